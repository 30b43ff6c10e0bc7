//! Sources of the fundamental field `f(t)`, evaluated as jets on demand.
//!
//! Every source hands out a homogeneous pair `(phi1, phi2)` with
//! `f = phi1 / phi2`. Möbius maps act linearly on the pair, and the composite
//! field built from it stays regular where `f` has a pole.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::composite::CompositeField;
use crate::dynamics::SolutionFamily;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sl2::Mat2;

pub trait FieldSource: Send + Sync + Debug {
    /// Numerator and denominator jets of order `order` at `t`.
    fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]>;

    /// Jet of `f` itself.
    fn jet(&self, t: f64, order: usize) -> Result<Jet> {
        let [p1, p2] = self.homogeneous(t, order)?;
        p1.div(&p2).map_err(|_| Error::Pole { t })
    }

    /// Composite field from a jet of order `order`; the result has order `order - 1`.
    fn composite(&self, t: f64, order: usize) -> Result<CompositeField> {
        let [p1, p2] = self.homogeneous(t, order)?;
        CompositeField::from_homogeneous(&p1, &p2)
    }
}

pub(crate) fn time_jet(t: f64, order: usize) -> Jet {
    Jet::var(t, order.max(1)).expect("order is at least one").truncate(order)
}

impl FieldSource for SolutionFamily {
    fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]> {
        SolutionFamily::homogeneous(self, t, order)
    }
}

/// Solution family plus an additive polynomial `sum_k poly[k] t^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedFamily {
    pub family: SolutionFamily,
    pub poly: Vec<f64>,
}

impl PerturbedFamily {
    pub fn new(family: SolutionFamily, poly: Vec<f64>) -> Self {
        Self { family, poly }
    }

    pub fn polynomial(&self, t: f64, order: usize) -> Jet {
        time_jet(t, order).horner(&self.poly)
    }

    /// Flat parameter list: `a, b, c, d, q^2, poly...`.
    pub fn params(&self) -> Vec<f64> {
        let f = &self.family;
        let mut v = vec![f.a, f.b, f.c, f.d, f.qsq];
        v.extend_from_slice(&self.poly);
        v
    }
}

impl FieldSource for PerturbedFamily {
    fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]> {
        let [num, den] = self.family.homogeneous(t, order)?;
        let p = self.polynomial(t, order);
        Ok([&num + &(&p * &den), den])
    }
}

/// `f = g ▷ tan(theta(t)/2)` with `theta(t) = k t + sum_j (alpha_j cos jt + beta_j sin jt)`.
///
/// `f` is `2 pi`-periodic as a map to the projective line, so its composite
/// field and Schwarzian are smooth periodic functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleField {
    pub turns: u32,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub frame: Mat2<f64>,
}

impl AngleField {
    /// Rejects phase data whose angle fails to be strictly increasing.
    pub fn new(turns: u32, cos: Vec<f64>, sin: Vec<f64>, frame: Mat2<f64>) -> Result<Self> {
        if turns == 0 {
            return Err(Error::InvalidArgument("angle field needs at least one turn".into()));
        }
        if cos.len() != sin.len() {
            return Err(Error::InvalidArgument("cos and sin coefficient counts differ".into()));
        }
        // |theta' - k| is bounded by sum_j j (|alpha_j| + |beta_j|)
        let bound: f64 = cos.iter().zip(&sin).enumerate().map(|(j, (c, s))| (j + 1) as f64 * (c.abs() + s.abs())).sum();
        if bound >= turns as f64 {
            return Err(Error::InvalidArgument("angle must be monotone".into()));
        }
        if frame.det() == 0.0 {
            return Err(Error::DegenerateMobius);
        }
        Ok(Self { turns, cos, sin, frame })
    }

    pub fn angle(&self, t: f64, order: usize) -> Jet {
        let tj = time_jet(t, order);
        let mut theta = tj.scale(self.turns as f64);
        for (j, (c, s)) in self.cos.iter().zip(self.sin.iter()).enumerate() {
            let (sn, cs) = tj.scale((j + 1) as f64).sin_cos();
            theta = &theta + &(&cs.scale(*c) + &sn.scale(*s));
        }
        theta
    }
}

impl FieldSource for AngleField {
    fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]> {
        let (s, c) = self.angle(t, order).scale(0.5).sin_cos();
        let [[a, b], [cc, d]] = self.frame.m;
        Ok([&s.scale(a) + &c.scale(b), &s.scale(cc) + &c.scale(d)])
    }
}
