use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde_json::{json, Value};

use schwarzian_core::dynamics::{
    first_order_qsq, format_number, integrate_first_order, integrate_schwarzian, Drift, Grid, IntegratorOptions,
    SolutionFamily, TRAJECTORY_HEADER,
};
use schwarzian_core::gauge::{winding, GroupPath};
use schwarzian_core::suite::{self, Report, SuiteConfig, Tolerances};
use schwarzian_core::Error;

use crate::args::{Common, Format, SimulateArgs, SuiteArgs, WindingArgs};
use crate::potential::{parse_h0, parse_potential};

/// Failure kinds mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a check failed or a run aborted.
    Check(String),
    /// Exit 2: bad flags or configuration.
    Config(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Config(m) => m,
        }
    }
}

fn config<E: ToString>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Config(format!("output error: {e}"))
}

fn sink(common: &Common) -> Result<Box<dyn Write>, Failure> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    let mut out = sink(common)?;
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    if !text.ends_with('\n') {
        out.write_all(b"\n").map_err(io_failure)?;
    }
    out.flush().map_err(io_failure)
}

fn suite_config(common: &Common, args: &SuiteArgs) -> Result<SuiteConfig, Failure> {
    let mut tolerances = Tolerances::default();
    for (name, value) in &common.tolerances {
        tolerances.set(name, *value).map_err(config)?;
    }
    if args.cases == Some(0) {
        return Err(Failure::Config("--cases must be at least 1".into()));
    }
    Ok(SuiteConfig { seed: common.seed, cases: args.cases, tolerances })
}

fn report_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check_name", "max_residual", "tolerance", "pass"]).expect("in-memory write");
    for c in &report.checks {
        w.write_record([
            c.check_name.clone(),
            format_number(c.max_residual),
            format_number(c.tolerance),
            c.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn run_suite(
    common: &Common,
    args: &SuiteArgs,
    runner: fn(&SuiteConfig) -> schwarzian_core::Result<Report>,
) -> Result<(), Failure> {
    let cfg = suite_config(common, args)?;
    let report = runner(&cfg).map_err(|e| Failure::Check(format!("suite aborted: {e}")))?;
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report_csv(&report),
    };
    emit(common, &text)?;
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        eprintln!("{verdict} {} max_residual={:e} tolerance={:e}", c.check_name, c.max_residual, c.tolerance);
    }
    let failing: Vec<&str> = report.failing().map(|c| c.check_name.as_str()).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failing checks: {}", failing.join(", "))))
    }
}

pub fn verify(common: &Common, args: &SuiteArgs) -> Result<(), Failure> {
    run_suite(common, args, suite::run_verify)
}

pub fn gauge_check(common: &Common, args: &SuiteArgs) -> Result<(), Failure> {
    run_suite(common, args, suite::run_gauge_check)
}

pub fn expand(common: &Common, args: &SuiteArgs) -> Result<(), Failure> {
    run_suite(common, args, suite::run_expand)
}

fn run_error(e: Error) -> Failure {
    match e {
        Error::ApproachingCriticalPoint { .. } | Error::BlowUp { .. } | Error::Pole { .. } => {
            Failure::Check(format!("integration aborted: {e}"))
        }
        other => Failure::Config(other.to_string()),
    }
}

fn summary(drift: &Drift, samples: usize) {
    eprintln!("samples={samples} charge_drift={:e} schwarzian_drift={:e}", drift.charges, drift.schwarzian);
}

pub fn simulate(common: &Common, args: &SimulateArgs) -> Result<(), Failure> {
    let grid = Grid::new(args.t0, args.t1, args.dt).map_err(config)?;
    let opts = IntegratorOptions::default();
    let format = common.format.unwrap_or(Format::Csv);
    let src = &args.source;
    if let Some([x0, v0, lambda]) = src.firstorder {
        let run = integrate_first_order(x0, v0, lambda, &grid, &opts).map_err(run_error)?;
        let text = match format {
            Format::Csv => {
                let mut s = format!("{TRAJECTORY_HEADER},x,v\n");
                for (sample, st) in run.trajectory.samples.iter().zip(&run.states) {
                    let row: Vec<String> =
                        sample.values().iter().chain([st.x, st.v].iter()).map(|x| format_number(*x)).collect();
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = run
                    .trajectory
                    .samples
                    .iter()
                    .zip(&run.states)
                    .map(|(sample, st)| {
                        let mut v = serde_json::to_value(sample).expect("sample serializes");
                        v["x"] = json!(st.x);
                        v["v"] = json!(st.v);
                        v
                    })
                    .collect();
                serde_json::to_string_pretty(&rows).expect("rows serialize")
            }
        };
        emit(common, &text)?;
        summary(&run.trajectory.drift(), run.trajectory.len());
        eprintln!("qsq={:e} lambda={:e}", first_order_qsq(x0, v0, lambda), lambda);
        return Ok(());
    }
    let init = if let Some([a, b, c, d, qsq]) = src.family {
        let fam = SolutionFamily::new(a, b, c, d, qsq).map_err(config)?;
        let jet = fam.eval(args.t0, 3).map_err(config)?;
        let d = jet.derivs();
        [d[0], d[1], d[2], d[3]]
    } else {
        src.init.expect("clap enforces exactly one source")
    };
    let traj = integrate_schwarzian(init, &grid, &opts).map_err(run_error)?;
    let text = match format {
        Format::Csv => traj.to_csv_string(),
        Format::Json => traj.to_json(),
    };
    emit(common, &text)?;
    summary(&traj.drift(), traj.len());
    Ok(())
}

pub fn winding_cmd(common: &Common, args: &WindingArgs) -> Result<(), Failure> {
    if args.steps < 2 {
        return Err(Failure::Config(format!("--steps must be at least 2, got {}", args.steps)));
    }
    let parsed = parse_potential(&args.potential).map_err(Failure::Config)?;
    let h0 = args.h0.as_deref().map(parse_h0).transpose().map_err(Failure::Config)?;
    let result = winding(parsed.potential, h0.as_ref().map(|g| g as &dyn GroupPath), args.steps).map_err(config)?;
    let note = parsed.dilation_sector.map(|n| {
        format!(
            "A = -2n T^1 with n = {n}: the paper labels this sector winding number n; \
             the literal integral gives {}",
            format_number(-2.0 * n)
        )
    });
    let h = result.holonomy.matrix().m;
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let v = json!({
                "potential": args.potential,
                "paper_value": result.paper_value,
                "paper_value_change": result.paper_value_change,
                "angle_lift": result.angle_lift,
                "angle_winding": result.angle_winding,
                "holonomy": h,
                "trivializable": result.trivializable,
                "note": note,
            });
            serde_json::to_string_pretty(&v).expect("winding result serializes")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "potential",
                "paper_value",
                "paper_value_change",
                "angle_lift",
                "angle_winding",
                "h11",
                "h12",
                "h21",
                "h22",
                "trivializable",
            ])
            .expect("in-memory write");
            w.write_record([
                args.potential.clone(),
                format_number(result.paper_value),
                format_number(result.paper_value_change),
                result.angle_lift.map_or_else(String::new, |l| l.to_string()),
                format_number(result.angle_winding),
                format_number(h[0][0]),
                format_number(h[0][1]),
                format_number(h[1][0]),
                format_number(h[1][1]),
                result.trivializable.to_string(),
            ])
            .expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
        }
    };
    emit(common, &text)?;
    if let Some(n) = note {
        eprintln!("note: {n}");
    }
    Ok(())
}
