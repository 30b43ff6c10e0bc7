//! Gauge potentials, group-valued paths, and local gauge transformations.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{time_jet, FieldSource};
use crate::jet::Jet;
use crate::sl2::{exp_sl2_jet, mobius_act_local, upper_basis, GroupElement, LieComponents, Mat2};

/// Tolerance for `A(0) = A(2 pi)` and `g(0) = g(2 pi)`.
pub const LOOP_TOL: f64 = 1e-8;

/// An sl(2,R)-valued potential `A(t)`, evaluated as a matrix of jets.
pub trait GaugePath: Send + Sync + Debug {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>>;

    fn value(&self, t: f64) -> Result<Mat2<f64>> {
        Ok(self.eval(t, 0)?.value())
    }

    /// Checks that `A` and its first two derivatives agree at `0` and `period`.
    fn check_loop(&self, period: f64) -> Result<()> {
        let a = self.eval(0.0, 2)?;
        let b = self.eval(period, 2)?;
        for k in 0..=2 {
            let (x, y) = (a.coeff(k), b.coeff(k));
            let diff = x.max_diff(&y);
            if diff > LOOP_TOL * (1.0 + x.max_abs()) {
                return Err(Error::NotALoop(format!("potential differs by {diff:.3e} between t = 0 and t = {period}")));
            }
        }
        Ok(())
    }
}

/// Constant potential `A = A_i T^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantGauge {
    pub components: [f64; 3],
}

impl ConstantGauge {
    pub fn new(components: [f64; 3]) -> Self {
        Self { components }
    }

    pub fn zero() -> Self {
        Self::new([0.0; 3])
    }

    /// `A = -2 n T^1`.
    pub fn dilation_sector(n: f64) -> Self {
        Self::new([0.0, -2.0 * n, 0.0])
    }

    pub fn matrix(&self) -> Mat2<f64> {
        LieComponents::lower(self.components).to_matrix()
    }
}

impl GaugePath for ConstantGauge {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        Ok(self.matrix().lift(t, order))
    }
}

/// `A_i(t) = sum_{k=0}^{M} (cos_ik cos kt + sin_ik sin kt)`, `2 pi`-periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierGauge {
    pub modes: usize,
    pub cos: [Vec<f64>; 3],
    pub sin: [Vec<f64>; 3],
}

impl FourierGauge {
    pub fn new(modes: usize, cos: [Vec<f64>; 3], sin: [Vec<f64>; 3]) -> Result<Self> {
        for v in cos.iter().chain(sin.iter()) {
            if v.len() != modes + 1 {
                return Err(Error::InvalidArgument(format!(
                    "expected {} coefficients per component, got {}",
                    modes + 1,
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { modes, cos, sin })
    }

    pub fn scaled(&self, eps: f64) -> Self {
        let s = |v: &[Vec<f64>; 3]| v.clone().map(|c| c.iter().map(|x| x * eps).collect());
        Self { modes: self.modes, cos: s(&self.cos), sin: s(&self.sin) }
    }
}

impl GaugePath for FourierGauge {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        let tj = time_jet(t, order);
        let mut comps = [0, 1, 2].map(|_| Jet::zero(t, order));
        for k in 0..=self.modes {
            let (s, c) = tj.scale(k as f64).sin_cos();
            for (i, comp) in comps.iter_mut().enumerate() {
                *comp = &*comp + &(&c.scale(self.cos[i][k]) + &s.scale(self.sin[i][k]));
            }
        }
        let zero = Mat2::<f64>::zeros().lift(t, order);
        Ok(upper_basis().iter().zip(&comps).fold(zero, |acc, (b, c)| acc + b.lift(t, order).scale_by(c)))
    }

    fn check_loop(&self, _period: f64) -> Result<()> {
        Ok(())
    }
}

/// `eps * A`.
#[derive(Clone, Debug)]
pub struct ScaledGauge {
    pub inner: Arc<dyn GaugePath>,
    pub eps: f64,
}

impl GaugePath for ScaledGauge {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        Ok(self.inner.eval(t, order)?.scale(self.eps))
    }
}

/// Pure gauge `A = g' g^-1` of a group path.
#[derive(Clone, Debug)]
pub struct PureGauge {
    pub path: Arc<dyn GroupPath>,
}

impl PureGauge {
    pub fn new(path: Arc<dyn GroupPath>) -> Self {
        Self { path }
    }

    /// Pure gauge of the rotation loop `exp(m t (T^0 + T^2))`.
    pub fn rotation(m: f64) -> Self {
        Self::new(Arc::new(RotationPath { rate: m }))
    }
}

impl GaugePath for PureGauge {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        let g = self.path.jet(t, order + 1)?;
        Ok(g.derivative().matmul(&g.adjugate().truncate(order)))
    }

    fn check_loop(&self, period: f64) -> Result<()> {
        let a = self.path.jet(0.0, 0)?.value();
        let b = self.path.jet(period, 0)?.value();
        let diff = a.max_diff(&b);
        if diff > LOOP_TOL {
            return Err(Error::NotALoop(format!("g(0) and g({period}) differ by {diff:.3e}")));
        }
        Ok(())
    }
}

/// An SL(2,R)-valued path `g(t)`, evaluated as a matrix of jets.
pub trait GroupPath: Send + Sync + Debug {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>>;

    fn at(&self, t: f64) -> Result<GroupElement> {
        GroupElement::from_matrix(self.jet(t, 0)?.value())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantPath(pub GroupElement);

impl GroupPath for ConstantPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        Ok(self.0.matrix().lift(t, order))
    }
}

/// `exp(rate * t * (T^0 + T^2))`, the rotation `[[cos, -sin], [sin, cos]]` of angle `rate * t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationPath {
    pub rate: f64,
}

impl GroupPath for RotationPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        let (s, c) = time_jet(t, order).scale(self.rate).sin_cos();
        Ok(Mat2::new(c.clone(), -&s, s, c))
    }
}

/// `g(t) = exp(X(t))` with `X(t) = sum_k t^k X_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyPath {
    pub coeffs: Vec<Mat2<f64>>,
}

impl ExpPolyPath {
    pub fn new(coeffs: Vec<Mat2<f64>>) -> Result<Self> {
        for c in &coeffs {
            if c.trace().abs() > 1e-12 * (1.0 + c.max_abs()) {
                return Err(Error::InvalidArgument("generator coefficients must be traceless".into()));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn generator(&self, t: f64, order: usize) -> Mat2<Jet> {
        let tj = time_jet(t, order);
        let mut acc = Mat2::<f64>::zeros().lift(t, order);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale_by(&tj) + c.lift(t, order);
        }
        acc
    }
}

impl GroupPath for ExpPolyPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        exp_sl2_jet(&self.generator(t, order))
    }
}

/// `g(t)^-1`.
#[derive(Clone, Debug)]
pub struct InversePath(pub Arc<dyn GroupPath>);

impl GroupPath for InversePath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        Ok(self.0.jet(t, order)?.adjugate())
    }
}

/// Pointwise product `g1(t) g2(t)`.
#[derive(Clone, Debug)]
pub struct ProductPath(pub Arc<dyn GroupPath>, pub Arc<dyn GroupPath>);

impl GroupPath for ProductPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        Ok(self.0.jet(t, order)?.matmul(&self.1.jet(t, order)?))
    }
}

/// `A' = g A g^-1 + g' g^-1`.
#[derive(Clone, Debug)]
pub struct TransformedGauge {
    pub g: Arc<dyn GroupPath>,
    pub inner: Arc<dyn GaugePath>,
}

impl GaugePath for TransformedGauge {
    fn eval(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        let g = self.g.jet(t, order + 1)?;
        let gd = g.derivative();
        let g = g.truncate(order);
        let gi = g.adjugate();
        let a = self.inner.eval(t, order)?;
        Ok(g.matmul(&a).matmul(&gi) + gd.matmul(&gi))
    }
}

/// `f' = g(t) ▷ f` with `t`-dependent Möbius coefficients.
#[derive(Clone, Debug)]
pub struct TransformedField {
    pub g: Arc<dyn GroupPath>,
    pub inner: Arc<dyn FieldSource>,
}

impl FieldSource for TransformedField {
    fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]> {
        let g = self.g.jet(t, order)?;
        let [p1, p2] = self.inner.homogeneous(t, order)?;
        Ok([&(g.a() * &p1) + &(g.b() * &p2), &(g.c() * &p1) + &(g.d() * &p2)])
    }

    fn jet(&self, t: f64, order: usize) -> Result<Jet> {
        let g = self.g.jet(t, order)?;
        mobius_act_local(&g, &self.inner.jet(t, order)?)
    }
}

/// Local gauge transformation of a potential and a field.
pub fn gauge_transform(
    g: Arc<dyn GroupPath>,
    a: Arc<dyn GaugePath>,
    f: Arc<dyn FieldSource>,
) -> (TransformedGauge, TransformedField) {
    (TransformedGauge { g: g.clone(), inner: a }, TransformedField { g, inner: f })
}

pub const CIRCLE: f64 = 2.0 * PI;
