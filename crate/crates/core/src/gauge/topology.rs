//! Holonomy, trivializing gauges, and winding on the circle.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sl2::{exp_sl2, lower_basis, GroupElement, Mat2};

use super::path::{FourierGauge, GaugePath, GroupPath, CIRCLE};

pub const DEFAULT_LOOP_STEPS: usize = 4096;

/// Holonomy closer than this (max-norm) to the identity counts as trivial.
pub const TRIVIAL_HOLONOMY_TOL: f64 = 1e-6;

/// Fourth-order Magnus exponent of `P' = A P` over `[t, t + h]`.
fn magnus_exponent(a: &dyn GaugePath, t: f64, h: f64) -> Result<Mat2<f64>> {
    let c = 3f64.sqrt() / 6.0;
    let a1 = a.value(t + (0.5 - c) * h)?;
    let a2 = a.value(t + (0.5 + c) * h)?;
    let comm = a2.commutator(&a1).scale(3f64.sqrt() * h * h / 12.0);
    Ok((a1 + a2).scale(h / 2.0) + comm)
}

/// Running product of `h' = -h A`, `h(t0) = 1`, sampled on a uniform grid.
///
/// As a group path it transforms `A` to zero: `h A h^-1 + h' h^-1 = 0`.
#[derive(Clone, Debug)]
pub struct HolonomyPath {
    potential: Arc<dyn GaugePath>,
    t0: f64,
    dt: f64,
    nodes: Vec<Mat2<f64>>,
}

impl HolonomyPath {
    pub fn build(potential: Arc<dyn GaugePath>, t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidArgument(format!("holonomy needs at least 2 steps, got {steps}")));
        }
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(Error::InvalidArgument(format!("empty interval [{t0}, {t1}]")));
        }
        let dt = (t1 - t0) / steps as f64;
        let mut nodes = Vec::with_capacity(steps + 1);
        let mut h = Mat2::identity();
        nodes.push(h.clone());
        for k in 0..steps {
            let omega = magnus_exponent(potential.as_ref(), t0 + k as f64 * dt, dt)?;
            h = h.matmul(exp_sl2(&omega.scale(-1.0)).matrix());
            if !h.m.iter().flatten().all(|x| x.is_finite()) {
                return Err(Error::NonFinite);
            }
            nodes.push(h.clone());
        }
        Ok(Self { potential, t0, dt, nodes })
    }

    pub fn nodes(&self) -> &[Mat2<f64>] {
        &self.nodes
    }

    pub fn end(&self) -> Result<GroupElement> {
        GroupElement::normalized(self.nodes.last().expect("at least one node"))
    }

    fn value_at(&self, t: f64) -> Result<Mat2<f64>> {
        let last = self.nodes.len() - 1;
        let k = (((t - self.t0) / self.dt).floor().max(0.0) as usize).min(last);
        let tk = self.t0 + k as f64 * self.dt;
        let h = t - tk;
        if h == 0.0 {
            return Ok(self.nodes[k].clone());
        }
        let omega = magnus_exponent(self.potential.as_ref(), tk, h)?;
        Ok(self.nodes[k].matmul(exp_sl2(&omega.scale(-1.0)).matrix()))
    }
}

impl GroupPath for HolonomyPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        let a = self.potential.eval(t, order)?;
        let mut coeffs = vec![self.value_at(t)?];
        for k in 0..order {
            let acc = (0..=k).fold(Mat2::zeros(), |acc, j| acc + coeffs[j].matmul(&a.coeff(k - j)));
            coeffs.push(acc.scale(-1.0 / (k + 1) as f64));
        }
        Mat2::from_coeffs(t, &coeffs)
    }
}

/// Time-ordered product over `[t0, t1]`, earlier factors on the left.
pub fn holonomy(a: Arc<dyn GaugePath>, t0: f64, t1: f64, steps: usize) -> Result<GroupElement> {
    HolonomyPath::build(a, t0, t1, steps)?.end()
}

pub fn trivializing_gauge(a: Arc<dyn GaugePath>, t0: f64, t1: f64, steps: usize) -> Result<HolonomyPath> {
    HolonomyPath::build(a, t0, t1, steps)
}

/// Rotation angle of the Iwasawa factor `g = k(theta) a n`, read off the first column.
pub fn iwasawa_angle(g: &Mat2<f64>) -> f64 {
    g.m[1][0].atan2(g.m[0][0])
}

/// Continuous lift of the rotation angle along a sequence of group elements, in turns.
pub fn angle_turns<'a, I: IntoIterator<Item = &'a Mat2<f64>>>(path: I) -> f64 {
    let mut iter = path.into_iter();
    let Some(first) = iter.next() else { return 0.0 };
    let mut prev = iwasawa_angle(first);
    let mut total = 0.0;
    for g in iter {
        let ang = iwasawa_angle(g);
        let mut delta = ang - prev;
        delta -= 2.0 * PI * (delta / (2.0 * PI)).round();
        total += delta;
        prev = ang;
    }
    total / (2.0 * PI)
}

/// Rotation-angle winding of a group path over `[0, 2 pi]`.
pub fn path_winding(path: &dyn GroupPath, steps: usize) -> Result<f64> {
    let samples: Vec<Mat2<f64>> =
        (0..=steps).map(|k| path.jet(CIRCLE * k as f64 / steps as f64, 0).map(|j| j.value())).collect::<Result<_>>()?;
    Ok(angle_turns(&samples))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingResult {
    /// `(1/pi) \oint tr T_1 (h A h^-1 + h' h^-1)` by the trapezoid rule.
    pub paper_value: f64,
    /// Change in `paper_value` when the sample count is doubled.
    pub paper_value_change: f64,
    /// Integer winding of the inverse running holonomy; absent unless it closes.
    pub angle_lift: Option<i64>,
    /// Unrounded rotation-angle winding in turns.
    pub angle_winding: f64,
    pub holonomy: GroupElement,
    pub trivializable: bool,
}

fn paper_integral(a: &dyn GaugePath, h0: Option<&dyn GroupPath>, samples: usize) -> Result<f64> {
    let t1 = &lower_basis()[1];
    let dt = CIRCLE / samples as f64;
    let mut sum = 0.0;
    for k in 0..samples {
        let t = k as f64 * dt;
        let x = match h0 {
            None => a.value(t)?,
            Some(g) => {
                let gj = g.jet(t, 1)?;
                let (gv, gd) = (gj.value(), gj.coeff(1));
                let gi = gv.adjugate().scale(1.0 / gv.det());
                gv.matmul(&a.value(t)?).matmul(&gi) + gd.matmul(&gi)
            }
        };
        sum += t1.trace_mul(&x);
    }
    Ok(sum * dt / PI)
}

/// Winding data of a `2 pi`-periodic potential.
pub fn winding(a: Arc<dyn GaugePath>, h0: Option<&dyn GroupPath>, steps: usize) -> Result<WindingResult> {
    a.check_loop(CIRCLE)?;
    if let Some(g) = h0 {
        let diff = g.jet(0.0, 0)?.value().max_diff(&g.jet(CIRCLE, 0)?.value());
        if diff > super::path::LOOP_TOL {
            return Err(Error::NotALoop(format!("h0(0) and h0(2 pi) differ by {diff:.3e}")));
        }
    }
    let paper_value = paper_integral(a.as_ref(), h0, steps)?;
    let refined = paper_integral(a.as_ref(), h0, 2 * steps)?;
    let path = HolonomyPath::build(a, 0.0, CIRCLE, steps)?;
    let holonomy = path.end()?;
    let trivializable = holonomy.distance_to_identity() < TRIVIAL_HOLONOMY_TOL;
    let inverses: Vec<Mat2<f64>> = path.nodes().iter().map(Mat2::adjugate).collect();
    let angle_winding = angle_turns(&inverses);
    let angle_lift = trivializable.then(|| angle_winding.round() as i64);
    Ok(WindingResult {
        paper_value,
        paper_value_change: (refined - paper_value).abs(),
        angle_lift,
        angle_winding,
        holonomy,
        trivializable,
    })
}

/// `g(t) = exp(X(t))` for a periodic algebra path `X`; a closed loop in the identity component.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpFourierPath(pub FourierGauge);

impl GroupPath for ExpFourierPath {
    fn jet(&self, t: f64, order: usize) -> Result<Mat2<Jet>> {
        crate::sl2::exp_sl2_jet(&self.0.eval(t, order)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::path::{ConstantGauge, ProductPath, PureGauge, RotationPath, TransformedGauge};

    #[test]
    fn zero_potential() {
        let w = winding(Arc::new(ConstantGauge::zero()), None, 256).unwrap();
        assert_eq!(w.paper_value, 0.0);
        assert_eq!(w.angle_lift, Some(0));
        assert!(w.holonomy.distance_to_identity() < 1e-15);
    }

    #[test]
    fn constant_holonomy_is_exponential() {
        let a = ConstantGauge::new([0.3, -0.7, 0.2]);
        let h = holonomy(Arc::new(a.clone()), 0.0, 1.7, 64).unwrap();
        let want = exp_sl2(&a.matrix().scale(-1.7));
        assert!(h.matrix().max_diff(want.matrix()) < 1e-12);
    }

    #[test]
    fn rotation_loops_wind() {
        for m in -3i64..=3 {
            let a: Arc<dyn GaugePath> = Arc::new(PureGauge::rotation(m as f64));
            let w = winding(a, None, DEFAULT_LOOP_STEPS).unwrap();
            assert!(w.holonomy.distance_to_identity() < 1e-6);
            assert_eq!(w.angle_lift, Some(m));
            assert!((w.paper_value).abs() < 1e-12);
        }
    }

    #[test]
    fn dilation_sector_literal_integral() {
        for n in [1.0, 2.0, 0.5] {
            let w = winding(Arc::new(ConstantGauge::dilation_sector(n)), None, DEFAULT_LOOP_STEPS).unwrap();
            assert!((w.paper_value + 2.0 * n).abs() < 1e-12);
            assert!(!w.trivializable);
            assert_eq!(w.angle_lift, None);
        }
    }

    #[test]
    fn trivializing_gauge_kills_potential() {
        let a: Arc<dyn GaugePath> = Arc::new(
            FourierGauge::new(
                2,
                [vec![0.2, 0.1, -0.05], vec![0.1, 0.3, 0.0], vec![-0.1, 0.0, 0.2]],
                [vec![0.0, 0.2, 0.1], vec![0.0, -0.1, 0.05], vec![0.0, 0.3, 0.0]],
            )
            .unwrap(),
        );
        let h: Arc<dyn GroupPath> = Arc::new(trivializing_gauge(a.clone(), 0.0, CIRCLE, DEFAULT_LOOP_STEPS).unwrap());
        let moved = TransformedGauge { g: h.clone(), inner: a };
        for k in 0..17 {
            let t = CIRCLE * k as f64 / 16.3;
            assert!(moved.eval(t, 2).unwrap().value().max_abs() < 1e-6);
            let det = h.jet(t, 0).unwrap().value().det();
            assert!((det - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn small_loops_do_not_change_winding() {
        let small = ExpFourierPath(
            FourierGauge::new(
                1,
                [vec![0.0, 0.1], vec![0.0, -0.2], vec![0.0, 0.15]],
                [vec![0.0, 0.2], vec![0.0, 0.1], vec![0.0, -0.1]],
            )
            .unwrap(),
        );
        let small: Arc<dyn GroupPath> = Arc::new(small);
        let w = winding(Arc::new(PureGauge::new(small.clone())), None, DEFAULT_LOOP_STEPS).unwrap();
        assert_eq!(w.angle_lift, Some(0));
        for m in [-2.0, 1.0, 3.0] {
            let rot: Arc<dyn GroupPath> = Arc::new(RotationPath { rate: m });
            let prod: Arc<dyn GroupPath> = Arc::new(ProductPath(rot, small.clone()));
            let w = winding(Arc::new(PureGauge::new(prod)), None, DEFAULT_LOOP_STEPS).unwrap();
            assert!(w.trivializable);
            assert_eq!(w.angle_lift, Some(m as i64));
        }
    }

    #[test]
    fn non_periodic_potential_rejected() {
        let a = PureGauge::rotation(0.5);
        assert!(matches!(winding(Arc::new(a), None, 64), Err(Error::NotALoop(_))));
    }

    #[test]
    fn paper_integral_with_rotation_h0_is_unchanged_for_zero() {
        let h0 = RotationPath { rate: 2.0 };
        let w = winding(Arc::new(ConstantGauge::zero()), Some(&h0), 512).unwrap();
        // h' h^-1 = 2 (T^0 + T^2) has no T^1 part
        assert!(w.paper_value.abs() < 1e-12);
    }

    #[test]
    fn iwasawa_angle_of_rotation() {
        assert!((iwasawa_angle(GroupElement::rotation(0.7).matrix()) - 0.7).abs() < 1e-15);
        assert!((path_winding(&RotationPath { rate: -2.0 }, 512).unwrap() + 2.0).abs() < 1e-12);
    }
}
