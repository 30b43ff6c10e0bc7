//! Textual potential specs: `const:A0,A1,A2`, `fourier:M:FILE`, `puregauge:rot:M`.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use schwarzian_core::gauge::{ConstantGauge, FourierGauge, GaugePath, PureGauge, RotationPath};

use crate::args::parse_list;

#[derive(Debug)]
pub struct ParsedPotential {
    pub potential: Arc<dyn GaugePath>,
    /// Constant potentials along `T^1` carry the dilation-sector label `n` with `A = -2n T^1`.
    pub dilation_sector: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct FourierRow {
    component: usize,
    k: usize,
    cos: f64,
    sin: f64,
}

pub fn parse_potential(spec: &str) -> Result<ParsedPotential, String> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| format!("malformed potential '{spec}'"))?;
    match kind {
        "const" => {
            let c = parse_list::<3>(rest)?;
            let sector = (c[0] == 0.0 && c[2] == 0.0 && c[1] != 0.0).then_some(-c[1] / 2.0);
            Ok(ParsedPotential { potential: Arc::new(ConstantGauge::new(c)), dilation_sector: sector })
        }
        "fourier" => {
            let (m, file) = rest.split_once(':').ok_or_else(|| format!("expected fourier:M:FILE, got '{spec}'"))?;
            let modes: usize = m.parse().map_err(|e| format!("bad mode cutoff '{m}': {e}"))?;
            let gauge = read_fourier(modes, Path::new(file))?;
            Ok(ParsedPotential { potential: Arc::new(gauge), dilation_sector: None })
        }
        "puregauge" => {
            let m = rest.strip_prefix("rot:").ok_or_else(|| format!("expected puregauge:rot:M, got '{spec}'"))?;
            let m: f64 = m.parse().map_err(|e| format!("bad winding '{m}': {e}"))?;
            Ok(ParsedPotential { potential: Arc::new(PureGauge::rotation(m)), dilation_sector: None })
        }
        other => Err(format!("unknown potential kind '{other}'")),
    }
}

pub fn parse_h0(spec: &str) -> Result<RotationPath, String> {
    let m = spec.strip_prefix("rot:").ok_or_else(|| format!("expected rot:M, got '{spec}'"))?;
    let rate: f64 = m.parse().map_err(|e| format!("bad winding '{m}': {e}"))?;
    Ok(RotationPath { rate })
}

/// CSV with header `component,k,cos,sin`; absent entries are zero.
fn read_fourier(modes: usize, path: &Path) -> Result<FourierGauge, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cos = [0; 3].map(|_| vec![0.0; modes + 1]);
    let mut sin = [0; 3].map(|_| vec![0.0; modes + 1]);
    for row in reader.deserialize() {
        let row: FourierRow = row.map_err(|e| format!("{}: {e}", path.display()))?;
        if row.component > 2 || row.k > modes {
            return Err(format!(
                "{}: entry (component {}, k {}) outside 0..=2 x 0..={modes}",
                path.display(),
                row.component,
                row.k
            ));
        }
        cos[row.component][row.k] = row.cos;
        sin[row.component][row.k] = row.sin;
    }
    FourierGauge::new(modes, cos, sin).map_err(|e| e.to_string())
}
