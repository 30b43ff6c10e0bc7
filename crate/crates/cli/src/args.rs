use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "schwarzian", version, about = "Gauged Schwarzian numerical laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for the random test cases.
    #[arg(long, global = true, default_value_t = schwarzian_core::suite::DEFAULT_SEED)]
    pub seed: u64,
    /// Override a named tolerance, e.g. `--tol gauge_invariance=1e-9`.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    pub tolerances: Vec<(String, f64)>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity, invariance, expansion and winding checks.
    Verify(SuiteArgs),
    /// Integrate the equation of motion and write the trajectory.
    Simulate(SimulateArgs),
    /// Local gauge invariance and the constant-gauge closed form.
    GaugeCheck(SuiteArgs),
    /// Holonomy and winding data of a periodic potential.
    Winding(WindingArgs),
    /// Cubic scaling of the second-order expansion remainder.
    Expand(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Random cases per check, replacing each check's default count.
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// Exact solution family `a,b,c,d,q^2` sampled at t0 for initial data.
    #[arg(long, value_name = "A,B,C,D,QSQ", value_parser = parse_list::<5>, allow_hyphen_values = true)]
    pub family: Option<[f64; 5]>,
    /// First-order system `x'' = lambda exp(x)` from `x0,v0,lambda`.
    #[arg(long, value_name = "X0,V0,LAMBDA", value_parser = parse_list::<3>, allow_hyphen_values = true)]
    pub firstorder: Option<[f64; 3]>,
    /// Raw initial data `f,f',f'',f'''` at t0.
    #[arg(long, value_name = "F,F1,F2,F3", value_parser = parse_list::<4>, allow_hyphen_values = true)]
    pub init: Option<[f64; 4]>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct WindingArgs {
    /// `const:A0,A1,A2`, `fourier:M:FILE`, or `puregauge:rot:M`.
    #[arg(long, allow_hyphen_values = true)]
    pub potential: String,
    /// Optional `rot:M` loop used as h0 in the literal winding integral.
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<String>,
    /// Holonomy steps over the circle.
    #[arg(long, default_value_t = schwarzian_core::gauge::DEFAULT_LOOP_STEPS)]
    pub steps: usize,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad tolerance value '{value}': {e}"))?;
    Ok((name.trim().to_string(), value))
}

pub fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_pairs() {
        assert_eq!(parse_tol("schwarzian=1e-30").unwrap(), ("schwarzian".into(), 1e-30));
        assert!(parse_tol("schwarzian").is_err());
        assert!(parse_tol("a=b").is_err());
    }

    #[test]
    fn number_lists() {
        assert_eq!(parse_list::<3>("0,-1, 2.5").unwrap(), [0.0, -1.0, 2.5]);
        assert!(parse_list::<3>("1,2").is_err());
        assert!(parse_list::<2>("1,x").is_err());
    }

    #[test]
    fn cli_shape_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
