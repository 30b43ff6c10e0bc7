//! Seeded generators for random test data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::SolutionFamily;
use crate::error::{Error, Result};
use crate::field::{AngleField, FieldSource, PerturbedFamily};
use crate::gauge::{ExpPolyPath, FourierGauge};
use crate::jet::Jet;
use crate::sl2::{exp_sl2, upper_basis, GroupElement, Mat2};

/// Samples below this `|f'|` at the basepoint are redrawn.
pub const MIN_SLOPE: f64 = 1e-3;
/// Samples with a Möbius denominator below this at the basepoint are redrawn.
pub const MIN_DENOMINATOR: f64 = 0.1;
const MAX_TRIES: usize = 10_000;

/// A random field together with the point it is evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldCase {
    pub field: PerturbedFamily,
    pub t: f64,
    #[serde(skip)]
    pub jet: Jet,
}

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    fn vec(&mut self, n: usize, scale: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(-scale, scale)).collect()
    }

    /// Family with entries in `[-1, 1]`, `|ad - bc| >= 0.1` and `q^2` in `[-4, 4]`.
    pub fn family(&mut self) -> SolutionFamily {
        loop {
            let [a, b, c, d] = [0; 4].map(|_| self.uniform(-1.0, 1.0));
            let qsq = self.uniform(-4.0, 4.0);
            if (a * d - b * c).abs() >= 0.1 {
                return SolutionFamily::new(a, b, c, d, qsq).expect("determinant bounded away from zero");
            }
        }
    }

    /// Perturbation polynomial of random degree at most five, coefficients in `[-0.2, 0.2]`.
    pub fn perturbation(&mut self) -> Vec<f64> {
        let degree = self.index(6);
        self.vec(degree + 1, 0.2)
    }

    /// Field and evaluation point with `t` in `[-1, 1]`, redrawn until well conditioned.
    pub fn field_case(&mut self, order: usize) -> Result<FieldCase> {
        for _ in 0..MAX_TRIES {
            let field = PerturbedFamily::new(self.family(), self.perturbation());
            let t = self.uniform(-1.0, 1.0);
            if let Ok(jet) = well_conditioned(&field, t, order) {
                return Ok(FieldCase { field, t, jet });
            }
        }
        Err(Error::InvalidArgument("no well-conditioned field sample found".into()))
    }

    /// Fresh evaluation point for an existing field.
    pub fn point_for(&mut self, field: &dyn FieldSource, order: usize) -> Result<(f64, Jet)> {
        for _ in 0..MAX_TRIES {
            let t = self.uniform(-1.0, 1.0);
            if let Ok(jet) = well_conditioned(field, t, order) {
                return Ok((t, jet));
            }
        }
        Err(Error::InvalidArgument("no well-conditioned evaluation point found".into()))
    }

    /// Traceless matrix `x_i T^i` with components in `[-scale, scale]`.
    pub fn algebra(&mut self, scale: f64) -> Mat2<f64> {
        let basis = upper_basis();
        let c = self.vec(3, scale);
        basis[0].scale(c[0]) + basis[1].scale(c[1]) + basis[2].scale(c[2])
    }

    /// Exponential of a random algebra element with unit-scale components.
    pub fn group_element(&mut self) -> GroupElement {
        exp_sl2(&self.algebra(1.0))
    }

    /// `exp(sum_k t^k X_k)` with random degree at most three.
    pub fn local_path(&mut self, scale: f64) -> ExpPolyPath {
        let degree = self.index(4);
        let coeffs = (0..=degree).map(|_| self.algebra(scale)).collect();
        ExpPolyPath::new(coeffs).expect("basis combinations are traceless")
    }

    /// Fourier potential with `modes` harmonics, coefficients in `[-scale, scale]`.
    pub fn fourier_gauge(&mut self, modes: usize, scale: f64) -> FourierGauge {
        let cos = [0; 3].map(|_| self.vec(modes + 1, scale));
        let sin = [0; 3].map(|_| {
            let mut v = self.vec(modes + 1, scale);
            v[0] = 0.0;
            v
        });
        FourierGauge::new(modes, cos, sin).expect("coefficient counts match")
    }

    /// Periodic field with one or two turns and a monotone angle.
    pub fn angle_field(&mut self, modes: usize) -> AngleField {
        let turns = 1 + self.index(2) as u32;
        // keep sum_j j (|a_j| + |b_j|) below half a turn
        let budget = 0.5 * turns as f64 / (modes * (modes + 1)).max(1) as f64;
        let cos = self.vec(modes, budget);
        let sin = self.vec(modes, budget);
        let frame = self.group_element().into_matrix();
        AngleField::new(turns, cos, sin, frame).expect("phase stays within the monotonicity budget")
    }
}

fn well_conditioned(field: &dyn FieldSource, t: f64, order: usize) -> Result<Jet> {
    let [_, den] = field.homogeneous(t, 0)?;
    if den.value().abs() < MIN_DENOMINATOR {
        return Err(Error::Pole { t });
    }
    let jet = field.jet(t, order)?;
    if order >= 1 && jet.deriv(1)?.abs() < MIN_SLOPE {
        return Err(Error::CriticalPoint);
    }
    if !jet.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(jet)
}
