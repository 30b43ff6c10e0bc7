//! Truncated Taylor-series arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `c_0..c_K` of a scalar function
//! about a basepoint `t0`, so the `k`-th derivative is `k! * c_k`. Products
//! are truncated Cauchy convolutions; elementary functions use the usual
//! first-order recurrences, so every coefficient is exact up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default truncation order. Covers fifth derivatives with one spare order.
pub const DEFAULT_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    t0: f64,
    coeffs: Vec<f64>,
}

/// Binary operations accepted by [`jet_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions accepted by [`jet_trig`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigFn {
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Jet {
    /// Builds a jet from raw Taylor coefficients.
    pub fn new(t0: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("jet needs at least one coefficient".into()));
        }
        if !t0.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { t0, coeffs })
    }

    /// Builds a jet from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(t0: f64, derivs: &[f64]) -> Result<Self> {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Self::new(t0, coeffs)
    }

    pub fn constant(t0: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { t0, coeffs }
    }

    pub fn zero(t0: f64, order: usize) -> Self {
        Self::constant(t0, 0.0, order)
    }

    /// The identity function `t -> t` expanded about `t0`.
    pub fn var(t0: f64, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InsufficientOrder { need: 1, got: order });
        }
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = t0;
        coeffs[1] = 1.0;
        Ok(Self { t0, coeffs })
    }

    pub fn basepoint(&self) -> f64 {
        self.t0
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the basepoint.
    pub fn deriv(&self, k: usize) -> Result<f64> {
        if k > self.order() {
            return Err(Error::InsufficientOrder { need: k, got: self.order() });
        }
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        Ok(fact * self.coeffs[k])
    }

    /// All derivatives `f, f', ..., f^(K)`.
    pub fn derivs(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Jet of the time derivative. The order drops by one.
    ///
    /// Panics on an order-0 jet; callers check orders at their API boundary.
    pub fn derivative(&self) -> Jet {
        assert!(self.order() >= 1, "derivative of an order-0 jet");
        let coeffs = self.coeffs[1..].iter().enumerate().map(|(k, c)| (k + 1) as f64 * c).collect();
        Jet { t0: self.t0, coeffs }
    }

    /// `k`-fold derivative, or an order error.
    pub fn derivative_n(&self, k: usize) -> Result<Jet> {
        if k > self.order() {
            return Err(Error::InsufficientOrder { need: k, got: self.order() });
        }
        let mut out = self.clone();
        for _ in 0..k {
            out = out.derivative();
        }
        Ok(out)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = (order + 1).min(self.coeffs.len());
        Jet { t0: self.t0, coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { t0: self.t0, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Reciprocal; fails when the constant term vanishes.
    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 || !a0.is_finite() {
            return Err(Error::SingularDenominator);
        }
        let n = self.coeffs.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * b[k - j]).sum();
            b[k] = -s / a0;
        }
        Jet::new(self.t0, b).map_err(|_| Error::SingularDenominator)
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        let (a, b) = align(self, rhs);
        let b0 = b.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::SingularDenominator);
        }
        let n = a.coeffs.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| b.coeffs[j] * q[k - j]).sum();
            q[k] = (a.coeffs[k] - s) / b0;
        }
        Jet::new(self.t0, q).map_err(|_| Error::SingularDenominator)
    }

    pub fn exp(&self) -> Jet {
        let n = self.coeffs.len();
        let mut e = vec![0.0; n];
        e[0] = self.coeffs[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { t0: self.t0, coeffs: e }
    }

    /// Natural logarithm; requires a positive constant term.
    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::InvalidArgument(format!("log of non-positive value {a0}")));
        }
        let n = self.coeffs.len();
        let mut l = vec![0.0; n];
        l[0] = a0.ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * self.coeffs[k - j]).sum();
            l[k] = (self.coeffs[k] - s / k as f64) / a0;
        }
        Ok(Jet { t0: self.t0, coeffs: l })
    }

    /// Square root; requires a positive constant term.
    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::InvalidArgument(format!("sqrt of non-positive value {a0}")));
        }
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        s[0] = a0.sqrt();
        for k in 1..n {
            let acc: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (self.coeffs[k] - acc) / (2.0 * s[0]);
        }
        Ok(Jet { t0: self.t0, coeffs: s })
    }

    /// `(sin a, cos a)` from the coupled recurrence.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        self.paired(-1.0, self.coeffs[0].sin(), self.coeffs[0].cos())
    }

    /// `(sinh a, cosh a)` from the coupled recurrence.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        self.paired(1.0, self.coeffs[0].sinh(), self.coeffs[0].cosh())
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    // s' = a' c, c' = sign * a' s
    fn paired(&self, sign: f64, s0: f64, c0: f64) -> (Jet, Jet) {
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = s0;
        c[0] = c0;
        for k in 1..n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.coeffs[j];
                ds += w * c[k - j];
                dc += w * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = sign * dc / k as f64;
        }
        (Jet { t0: self.t0, coeffs: s }, Jet { t0: self.t0, coeffs: c })
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(self.t0, 1.0, self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Evaluates `sum_k series[k] * self^k` by Horner's rule.
    pub fn horner(&self, series: &[f64]) -> Jet {
        let mut acc = Jet::zero(self.t0, self.order());
        for c in series.iter().rev() {
            acc = (&acc * self).add_scalar(*c);
        }
        acc
    }
}

fn align<'a>(a: &'a Jet, b: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
    use std::borrow::Cow;
    debug_assert!(
        a.t0 == b.t0 || (a.t0 - b.t0).abs() <= 1e-12 * (1.0 + a.t0.abs()),
        "jets expanded about different basepoints"
    );
    let n = a.order().min(b.order());
    let a = if a.order() == n { Cow::Borrowed(a) } else { Cow::Owned(a.truncate(n)) };
    let b = if b.order() == n { Cow::Borrowed(b) } else { Cow::Owned(b.truncate(n)) };
    (a, b)
}

/// Checked binary arithmetic: both operands must share basepoint and order.
pub fn jet_arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet> {
    if a.t0 != b.t0 {
        return Err(Error::Mismatch(format!("basepoints {} and {}", a.t0, b.t0)));
    }
    if a.order() != b.order() {
        return Err(Error::Mismatch(format!("orders {} and {}", a.order(), b.order())));
    }
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.div(b),
    }
}

pub fn jet_exp(a: &Jet) -> Jet {
    a.exp()
}

pub fn jet_trig(a: &Jet, which: TrigFn) -> Jet {
    match which {
        TrigFn::Sin => a.sin(),
        TrigFn::Cos => a.cos(),
        TrigFn::Sinh => a.sinh(),
        TrigFn::Cosh => a.cosh(),
    }
}

// Mixed-order operands are truncated to the smaller order.

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        let (a, b) = align(self, rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Jet { t0: self.t0, coeffs }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        let (a, b) = align(self, rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Jet { t0: self.t0, coeffs }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        let (a, b) = align(self, rhs);
        let n = a.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (j, y) in b.coeffs[..n - i].iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Jet { t0: self.t0, coeffs: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &'a Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn var_coefficients() {
        assert_eq!(Jet::var(2.0, 2).unwrap().coeffs(), &[2.0, 1.0, 0.0]);
        assert_eq!(Jet::var(0.0, 4).unwrap().coeffs(), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(Jet::var(5.0, 3).unwrap().deriv(1).unwrap(), 1.0);
        assert!(matches!(Jet::var(1.0, 0), Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn arith_examples() {
        let t = Jet::var(2.0, 2).unwrap();
        assert_eq!(jet_arith(&t, &t, ArithOp::Mul).unwrap().coeffs(), &[4.0, 4.0, 1.0]);

        let one = Jet::new(0.0, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let den = Jet::new(0.0, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let q = jet_arith(&one, &den, ArithOp::Div).unwrap();
        assert!(close(q.coeffs(), &[1.0, -1.0, 1.0, -1.0], 1e-15));

        let a = Jet::new(0.0, vec![1.0, 2.0]).unwrap();
        let b = Jet::new(0.0, vec![3.0, 4.0]).unwrap();
        assert_eq!(jet_arith(&a, &b, ArithOp::Add).unwrap().coeffs(), &[4.0, 6.0]);
    }

    #[test]
    fn singular_denominator() {
        let a = Jet::var(0.0, 3).unwrap();
        assert_eq!(Jet::constant(0.0, 1.0, 3).div(&a), Err(Error::SingularDenominator));
        assert_eq!(a.recip(), Err(Error::SingularDenominator));
    }

    #[test]
    fn mismatched_operands_rejected() {
        let a = Jet::var(0.0, 3).unwrap();
        let b = Jet::var(1.0, 3).unwrap();
        let c = Jet::var(0.0, 2).unwrap();
        assert!(matches!(jet_arith(&a, &b, ArithOp::Add), Err(Error::Mismatch(_))));
        assert!(matches!(jet_arith(&a, &c, ArithOp::Mul), Err(Error::Mismatch(_))));
    }

    #[test]
    fn elementary_examples() {
        let t = Jet::var(0.0, 3).unwrap();
        assert!(close(jet_exp(&t).coeffs(), &[1.0, 1.0, 0.5, 1.0 / 6.0], 1e-15));
        let c = Jet::constant(0.0, 0.7, 1);
        assert!(close(c.exp().coeffs(), &[0.7f64.exp(), 0.0], 1e-15));
        assert!(close(jet_trig(&t, TrigFn::Cos).coeffs(), &[1.0, 0.0, -0.5, 0.0], 1e-15));
        assert!(close(jet_trig(&t, TrigFn::Sin).coeffs(), &[0.0, 1.0, 0.0, -1.0 / 6.0], 1e-15));
        assert!(close(jet_trig(&t, TrigFn::Sinh).coeffs(), &[0.0, 1.0, 0.0, 1.0 / 6.0], 1e-15));
        assert!(close(jet_trig(&t, TrigFn::Cosh).coeffs(), &[1.0, 0.0, 0.5, 0.0], 1e-15));
    }

    #[test]
    fn sqrt_and_ln() {
        let t = Jet::var(1.0, 5).unwrap();
        let s = t.sqrt().unwrap();
        let sq = &s * &s;
        assert!(close(sq.coeffs(), t.coeffs(), 1e-15));
        let l = t.ln().unwrap();
        // log(1 + d) = d - d^2/2 + d^3/3 - ...
        assert!(close(l.coeffs(), &[0.0, 1.0, -0.5, 1.0 / 3.0, -0.25, 0.2], 1e-15));
        assert!(t.scale(-1.0).sqrt().is_err());
    }

    #[test]
    fn derivative_shifts_coefficients() {
        // t^3 at t0 = 2: 8, 12, 6, 1
        let t = Jet::var(2.0, 3).unwrap();
        let cube = t.powi(3);
        assert!(close(cube.coeffs(), &[8.0, 12.0, 6.0, 1.0], 1e-14));
        let d = cube.derivative();
        assert!(close(d.coeffs(), &[12.0, 12.0, 3.0], 1e-14));
        assert_eq!(cube.deriv(3).unwrap(), 6.0);
        assert!(cube.derivative_n(4).is_err());
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = Jet::var(0.0, 4).unwrap();
        let b = Jet::var(0.0, 2).unwrap();
        assert_eq!((&a + &b).order(), 2);
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(Jet::new(0.0, vec![f64::NAN]), Err(Error::NonFinite));
        assert!(Jet::new(0.0, vec![]).is_err());
    }
}
