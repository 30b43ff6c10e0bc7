//! Covariant derivatives, the gauged composite field, and the gauge-invariant Schwarzian.

use crate::composite::{identity_report, CompositeField, IdentityReport};
use crate::dynamics::noether_charges;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sl2::Mat2;

use super::path::GaugePath;

const SINGULAR_FORM_FACTOR: f64 = 1e-14;

/// Potential evaluated at the composite field's basepoint and order.
fn potential_for(cf: &CompositeField, a: &dyn GaugePath) -> Result<Mat2<Jet>> {
    a.eval(cf.basepoint(), cf.order())
}

/// `phi = 1 + 2 tr(A f)` as a jet.
pub fn form_factor(cf: &CompositeField, a: &dyn GaugePath) -> Result<Jet> {
    let am = potential_for(cf, a)?;
    let phi = am.trace_mul(cf.matrix()).scale(2.0).add_scalar(1.0);
    if phi.value().abs() < SINGULAR_FORM_FACTOR {
        return Err(Error::GaugeSingular);
    }
    Ok(phi)
}

/// `f_A = f / (1 + 2 tr(A f))`, with the order of the composite field.
pub fn gauged_composite_of(cf: &CompositeField, a: &dyn GaugePath) -> Result<Mat2<Jet>> {
    let inv = form_factor(cf, a)?.recip()?;
    Ok(cf.matrix().scale_by(&inv))
}

pub fn gauged_composite(fjet: &Jet, a: &dyn GaugePath) -> Result<Mat2<Jet>> {
    gauged_composite_of(&CompositeField::from_jet(fjet)?, a)
}

/// `D_A f = f' (1 + 2 tr(A f))` at the basepoint.
pub fn covariant_deriv_f(fjet: &Jet, a: &dyn GaugePath) -> Result<f64> {
    let f1 = fjet.deriv(1)?;
    if f1 == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let cf = CompositeField::from_jet(fjet)?;
    Ok(f1 * form_factor(&cf, a)?.value())
}

/// Adjoint covariant derivative `X' - [A, X]`; the result loses one order.
pub fn covariant_adjoint(x: &Mat2<Jet>, a: &Mat2<Jet>) -> Mat2<Jet> {
    let order = x.order().saturating_sub(1);
    let xt = x.truncate(order);
    x.derivative() - a.truncate(order).commutator(&xt)
}

/// Value of the gauge-invariant Schwarzian and the magnitude its rounding error scales with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue {
    pub value: f64,
    /// `max(1, |S|, 2 m^2)` with `m` the largest entry among the four terms of the matrix being squared.
    pub scale: f64,
}

pub fn gauged_schwarzian_scaled_of(cf: &CompositeField, a: &dyn GaugePath) -> Result<ScaledValue> {
    if cf.order() < 2 {
        return Err(Error::InsufficientOrder { need: 3, got: cf.order() + 1 });
    }
    let fa = gauged_composite_of(cf, a)?;
    let am = potential_for(cf, a)?;
    let (f0, f1, f2) = (fa.value(), fa.coeff(1), fa.coeff(2).scale(2.0));
    let (a0, a1) = (am.value(), am.coeff(1));
    let terms = [f2, a1.commutator(&f0), a0.commutator(&f1).scale(2.0), a0.commutator(&a0.commutator(&f0))];
    let x = terms[0].clone() - terms[1].clone() - terms[2].clone() + terms[3].clone();
    let value = x.trace_mul(&x);
    let m = terms.iter().map(Mat2::max_abs).fold(x.max_abs(), f64::max);
    Ok(ScaledValue { value, scale: 1f64.max(value.abs()).max(2.0 * m * m) })
}

/// Gauge-invariant Schwarzian from a composite field of order at least two.
pub fn gauged_schwarzian_of(cf: &CompositeField, a: &dyn GaugePath) -> Result<f64> {
    Ok(gauged_schwarzian_scaled_of(cf, a)?.value)
}

/// `tr(f_A'' - [A', f_A] - 2[A, f_A'] + [A, [A, f_A]])^2`.
pub fn gauged_schwarzian(fjet: &Jet, a: &dyn GaugePath) -> Result<f64> {
    if fjet.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, got: fjet.order() });
    }
    gauged_schwarzian_of(&CompositeField::from_jet(fjet)?, a)
}

pub fn gauged_schwarzian_scaled(fjet: &Jet, a: &dyn GaugePath) -> Result<ScaledValue> {
    if fjet.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, got: fjet.order() });
    }
    gauged_schwarzian_scaled_of(&CompositeField::from_jet(fjet)?, a)
}

/// First- and second-order terms of `S[A]` in `A`, valid up to total derivatives.
pub fn expansion_terms_of(cf: &CompositeField, a: &dyn GaugePath) -> Result<(f64, f64)> {
    if cf.order() < 2 {
        return Err(Error::InsufficientOrder { need: 3, got: cf.order() + 1 });
    }
    let am = potential_for(cf, a)?;
    let (f, f2) = (cf.at(0)?, cf.at(2)?);
    let (a0, a1) = (am.value(), am.coeff(1));
    let s = f2.trace_mul(&f2);
    let n = f2 + f.scale(2.0 * s);
    let s1 = 2.0 * n.trace_mul(&a0);
    let fa1 = f.trace_mul(&a1);
    let fa = f.trace_mul(&a0);
    let s2 = -2.0 * fa1 * fa1 + 4.0 * f.matmul(&a0).trace_mul(&a1) - 4.0 * fa * fa * s - 2.0 * a0.trace_mul(&a0);
    Ok((s1, s2))
}

pub fn expansion_terms(fjet: &Jet, a: &dyn GaugePath) -> Result<(f64, f64)> {
    if fjet.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, got: fjet.order() });
    }
    expansion_terms_of(&CompositeField::from_jet(fjet)?, a)
}

/// `2 tr(N A)` through the Noether charge matrix; agrees with the first expansion term.
pub fn charge_coupling(fjet: &Jet, a: &dyn GaugePath) -> Result<f64> {
    let n = noether_charges(fjet)?.matrix;
    let am = a.eval(fjet.basepoint(), 0)?.value();
    Ok(2.0 * n.trace_mul(&am))
}

/// Composite identities with covariant derivatives acting on `f_A` and `S` replaced by `S[A]`.
pub fn covariant_identity_suite(cf: &CompositeField, a: &dyn GaugePath) -> Result<IdentityReport> {
    if cf.order() < 5 {
        return Err(Error::InsufficientOrder { need: 6, got: cf.order() + 1 });
    }
    let am = potential_for(cf, a)?;
    let mut ladder = vec![gauged_composite_of(cf, a)?];
    for _ in 0..5 {
        let next = covariant_adjoint(ladder.last().expect("ladder starts non-empty"), &am);
        ladder.push(next);
    }
    let s = ladder[2].trace_mul(&ladder[2]);
    let d: Vec<Mat2<f64>> = ladder.iter().map(Mat2::value).collect();
    Ok(identity_report(&d, s.value(), s.deriv(1)?))
}

/// The closed form for `A = -2n T^1`:
/// `(f''' + 4n^3 f)/(f' - 2nf) + (-3/2 f''^2 + 6n f'(f'' - 2n f' + 2n^2 f))/(f' - 2nf)^2`.
pub fn constant_gauge_closed_form(fjet: &Jet, n: f64) -> Result<f64> {
    if fjet.order() < 3 {
        return Err(Error::InsufficientOrder { need: 3, got: fjet.order() });
    }
    let d = fjet.derivs();
    let (f, f1, f2, f3) = (d[0], d[1], d[2], d[3]);
    if f1 == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let den = f1 - 2.0 * n * f;
    if den.abs() < SINGULAR_FORM_FACTOR * f1.abs() {
        return Err(Error::GaugeSingular);
    }
    let num2 = -1.5 * f2 * f2 + 6.0 * n * f1 * (f2 - 2.0 * n * f1 + 2.0 * n * n * f);
    Ok((f3 + 4.0 * n.powi(3) * f) / den + num2 / (den * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::schwarzian_direct;
    use crate::gauge::path::{ConstantGauge, FourierGauge};
    use crate::sl2::upper_basis;

    fn sample_jet(t0: f64) -> Jet {
        // f = e^t + t^3/5 + 0.3 t
        let t = Jet::var(t0, 7).unwrap();
        &(&t.exp() + &t.powi(3).scale(0.2)) + &t.scale(0.3)
    }

    #[test]
    fn zero_potential_reduces_to_plain_objects() {
        let f = sample_jet(0.2);
        let zero = ConstantGauge::zero();
        assert!((covariant_deriv_f(&f, &zero).unwrap() - f.deriv(1).unwrap()).abs() < 1e-15);
        let fa = gauged_composite(&f, &zero).unwrap();
        assert_eq!(fa.value(), CompositeField::from_jet(&f).unwrap().at(0).unwrap());
        let s = schwarzian_direct(&f).unwrap();
        assert!((gauged_schwarzian(&f, &zero).unwrap() - s).abs() < 1e-12 * s.abs().max(1.0));
        assert_eq!(expansion_terms(&f, &zero).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn dilation_potential_covariant_derivative() {
        let f = sample_jet(-0.4);
        let d = f.derivs();
        for n in [-2.0, 0.5, 1.0, 3.0] {
            let got = covariant_deriv_f(&f, &ConstantGauge::dilation_sector(n)).unwrap();
            assert!((got - (d[1] - 2.0 * n * d[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn form_factor_geometric_series() {
        let f = sample_jet(0.1);
        let a = ConstantGauge::new([0.004, -0.006, 0.008]);
        let cf = CompositeField::from_jet(&f).unwrap();
        let fa = gauged_composite_of(&cf, &a).unwrap().value();
        let f0 = cf.at(0).unwrap();
        let xi = -2.0 * a.matrix().trace_mul(&f0);
        let series: f64 = (0..=6).map(|k| xi.powi(k)).sum();
        assert!(fa.max_diff(&f0.scale(series)) < 1e-12);
    }

    #[test]
    fn constant_gauge_matches_closed_form_and_pure_gauge_oracle() {
        for n in [-2.0, -1.0, 1.0, 3.0] {
            let t0 = 0.25;
            let f = sample_jet(t0);
            let num = gauged_schwarzian(&f, &ConstantGauge::dilation_sector(n)).unwrap();
            let closed = constant_gauge_closed_form(&f, n).unwrap();
            let t = Jet::var(t0, 7).unwrap();
            let oracle = schwarzian_direct(&(&t.scale(-2.0 * n).exp() * &f)).unwrap();
            assert!((num - closed).abs() < 1e-10 * closed.abs().max(1.0), "n={n}");
            assert!((num - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn first_term_is_charge_coupling() {
        let f = sample_jet(0.3);
        let eps = 0.01;
        let a = ConstantGauge::new([0.0, eps, 0.0]);
        let (s1, _) = expansion_terms(&f, &a).unwrap();
        let charges = noether_charges(&f).unwrap();
        assert!((s1 - eps * charges.n[1]).abs() < 1e-13);
        assert!((s1 - charge_coupling(&f, &a).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn covariant_identities_hold() {
        let f = sample_jet(0.15);
        let a = FourierGauge::new(
            1,
            [vec![0.1, 0.05], vec![-0.2, 0.1], vec![0.05, 0.0]],
            [vec![0.0, 0.1], vec![0.0, -0.05], vec![0.0, 0.2]],
        )
        .unwrap();
        let cf = CompositeField::from_jet(&f).unwrap();
        let rep = covariant_identity_suite(&cf, &a).unwrap();
        assert!(rep.max_relative() < 1e-9, "{rep:?}");
        let s = gauged_schwarzian(&f, &a).unwrap();
        assert!((rep.schwarzian - s).abs() < 1e-10 * s.abs().max(1.0));
    }

    #[test]
    fn gauge_singular_point_detected() {
        // f = t at t = 1: phi = 1 - 2 n t, vanishes at n = 1/2
        let f = Jet::var(1.0, 5).unwrap();
        let a = ConstantGauge::dilation_sector(0.5);
        assert_eq!(covariant_deriv_f(&f, &a), Err(Error::GaugeSingular));
        assert_eq!(gauged_schwarzian(&f, &a), Err(Error::GaugeSingular));
        let flat = Jet::constant(0.0, 2.0, 5);
        assert_eq!(covariant_deriv_f(&flat, &a), Err(Error::CriticalPoint));
    }

    #[test]
    fn adjoint_derivative_of_constant_commutes() {
        let [t0, t1, _] = upper_basis();
        let x = t0.lift(0.0, 3);
        let a = t1.lift(0.0, 3);
        let d = covariant_adjoint(&x, &a);
        assert_eq!(d.order(), 2);
        assert!(d.value().max_diff(&t0.scale(1.0)) < 1e-15);
    }
}
