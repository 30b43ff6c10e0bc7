//! The sl(2,R) algebra and SL(2,R) group in the defining representation.
//!
//! Basis conventions: `T^0 = [[0,-1],[0,0]]`, `T^1 = diag(-1/2, 1/2)`,
//! `T^2 = [[0,0],[1,0]]`, with dual basis `T_i = gamma_ij T^j`. Lower-index
//! components expand against `T^i` (`A = A_i T^i`), upper-index components
//! against `T_i` (`N = N^i T_i`), so `N^i A_i = 2 tr(N A)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Ring operations needed for 2x2 matrix algebra over reals and jets.
pub trait Scalar: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn scale(&self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn scale(&self, s: f64) -> f64 {
        self * s
    }
}

impl Scalar for Jet {
    fn scale(&self, s: f64) -> Jet {
        Jet::scale(self, s)
    }
}

/// Row-major 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn a(&self) -> &T {
        &self.m[0][0]
    }
    pub fn b(&self) -> &T {
        &self.m[0][1]
    }
    pub fn c(&self) -> &T {
        &self.m[1][0]
    }
    pub fn d(&self) -> &T {
        &self.m[1][1]
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> Mat2<U> {
        Mat2 { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    pub fn try_map<U, F: FnMut(&T) -> Result<U>>(&self, mut f: F) -> Result<Mat2<U>> {
        Ok(Mat2 { m: [[f(&self.m[0][0])?, f(&self.m[0][1])?], [f(&self.m[1][0])?, f(&self.m[1][1])?]] })
    }

    pub fn zip_with<F: FnMut(&T, &T) -> T>(&self, other: &Self, mut f: F) -> Self {
        Mat2 {
            m: [
                [f(&self.m[0][0], &other.m[0][0]), f(&self.m[0][1], &other.m[0][1])],
                [f(&self.m[1][0], &other.m[1][0]), f(&self.m[1][1], &other.m[1][1])],
            ],
        }
    }

    pub fn trace(&self) -> T {
        self.m[0][0].clone() + self.m[1][1].clone()
    }

    pub fn det(&self) -> T {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    /// `[[d, -b], [-c, a]]`; the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.m[1][1].clone(), -self.m[0][1].clone(), -self.m[1][0].clone(), self.m[0][0].clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn scale_by(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let e =
            |i: usize, j: usize| self.m[i][0].clone() * o.m[0][j].clone() + self.m[i][1].clone() * o.m[1][j].clone();
        Mat2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.matmul(o) - o.matmul(self)
    }

    /// `tr(X Y)` without forming the full product.
    pub fn trace_mul(&self, o: &Self) -> T {
        self.m[0][0].clone() * o.m[0][0].clone()
            + self.m[0][1].clone() * o.m[1][0].clone()
            + self.m[1][0].clone() * o.m[0][1].clone()
            + self.m[1][1].clone() * o.m[1][1].clone()
    }

    /// Pairing `2 tr(X Y)`; contracts components without extra factors.
    pub fn trace_pair(&self, o: &Self) -> T {
        self.trace_mul(o).scale(2.0)
    }
}

impl Mat2<f64> {
    pub fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zeros() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Max-norm of the entries.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        (self.clone() - o.clone()).max_abs()
    }

    /// Constant jet matrix at `t0`.
    pub fn lift(&self, t0: f64, order: usize) -> Mat2<Jet> {
        self.map(|x| Jet::constant(t0, *x, order))
    }
}

impl Mat2<Jet> {
    pub fn value(&self) -> Mat2<f64> {
        self.map(|x| x.value())
    }

    pub fn derivative(&self) -> Mat2<Jet> {
        self.map(|x| x.derivative())
    }

    pub fn order(&self) -> usize {
        self.m.iter().flatten().map(Jet::order).min().unwrap_or(0)
    }

    pub fn basepoint(&self) -> f64 {
        self.m[0][0].basepoint()
    }

    pub fn truncate(&self, order: usize) -> Mat2<Jet> {
        self.map(|x| x.truncate(order))
    }

    /// Matrix of `k`-th Taylor coefficients.
    pub fn coeff(&self, k: usize) -> Mat2<f64> {
        self.map(|x| x.coeff(k))
    }

    /// Assembles a jet matrix from per-order coefficient matrices.
    pub fn from_coeffs(t0: f64, coeffs: &[Mat2<f64>]) -> Result<Mat2<Jet>> {
        let entry = |i: usize, j: usize| Jet::new(t0, coeffs.iter().map(|c| c.m[i][j]).collect());
        Ok(Mat2 { m: [[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]] })
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, o: Mat2<T>) -> Mat2<T> {
        self.zip_with(&o, |x, y| x.clone() + y.clone())
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, o: Mat2<T>) -> Mat2<T> {
        self.zip_with(&o, |x, y| x.clone() - y.clone())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        self.matmul(&o)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Mat2<T>;
    fn neg(self) -> Mat2<T> {
        self.map(|x| -x.clone())
    }
}

/// Basis, dual basis and metric of sl(2,R).
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    pub upper: [Mat2<f64>; 3],
    pub lower: [Mat2<f64>; 3],
    pub metric: [[f64; 3]; 3],
    pub metric_inv: [[f64; 3]; 3],
}

pub fn basis() -> Basis {
    Basis {
        upper: upper_basis(),
        lower: lower_basis(),
        metric: [[0.0, 0.0, -2.0], [0.0, 1.0, 0.0], [-2.0, 0.0, 0.0]],
        metric_inv: [[0.0, 0.0, -0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, 0.0]],
    }
}

/// `T^0, T^1, T^2`.
pub fn upper_basis() -> [Mat2<f64>; 3] {
    [Mat2::new(0.0, -1.0, 0.0, 0.0), Mat2::new(-0.5, 0.0, 0.0, 0.5), Mat2::new(0.0, 0.0, 1.0, 0.0)]
}

/// `T_0 = -T^2/2, T_1 = T^1, T_2 = -T^0/2`.
pub fn lower_basis() -> [Mat2<f64>; 3] {
    [Mat2::new(0.0, 0.0, -0.5, 0.0), Mat2::new(-0.5, 0.0, 0.0, 0.5), Mat2::new(0.0, 0.5, 0.0, 0.0)]
}

/// Which basis a component triple expands against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexKind {
    /// `N^i`, expanded as `N^i T_i`.
    Upper,
    /// `A_i`, expanded as `A_i T^i`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieComponents {
    pub kind: IndexKind,
    pub values: [f64; 3],
}

impl LieComponents {
    pub fn upper(values: [f64; 3]) -> Self {
        Self { kind: IndexKind::Upper, values }
    }

    pub fn lower(values: [f64; 3]) -> Self {
        Self { kind: IndexKind::Lower, values }
    }

    pub fn to_matrix(&self) -> Mat2<f64> {
        let b = match self.kind {
            IndexKind::Upper => lower_basis(),
            IndexKind::Lower => upper_basis(),
        };
        (0..3).fold(Mat2::zeros(), |acc, i| acc + b[i].scale(self.values[i]))
    }

    /// Components of `x` via `X = 2 T_i tr(T^i X)` (or its dual).
    pub fn from_matrix(kind: IndexKind, x: &Mat2<f64>) -> Self {
        let b = match kind {
            IndexKind::Upper => upper_basis(),
            IndexKind::Lower => lower_basis(),
        };
        Self { kind, values: [0, 1, 2].map(|i| b[i].trace_pair(x)) }
    }

    /// `N^i A_i`; requires one upper and one lower triple.
    pub fn contract(&self, other: &Self) -> Result<f64> {
        if self.kind == other.kind {
            return Err(Error::InvalidArgument("contraction needs one upper and one lower triple".into()));
        }
        Ok((0..3).map(|i| self.values[i] * other.values[i]).sum())
    }

    /// Adjoint action `g X g^-1` expressed on the components.
    pub fn transform(&self, g: &Mat2<f64>) -> Result<Self> {
        let m = match self.kind {
            IndexKind::Upper => adjoint_matrix_n(g)?,
            IndexKind::Lower => adjoint_matrix_a(g)?,
        };
        let v = self.values;
        let values = [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] * v[j]).sum());
        Ok(Self { kind: self.kind, values })
    }
}

/// Element of SL(2,R): determinant one within `1e-10`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Mat2<f64>);

pub const DET_TOL: f64 = 1e-10;

impl GroupElement {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::from_matrix(Mat2::new(a, b, c, d))
    }

    pub fn from_matrix(m: Mat2<f64>) -> Result<Self> {
        let det = m.det();
        if !det.is_finite() || (det - 1.0).abs() > DET_TOL {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self(m))
    }

    /// Rescales a matrix with positive determinant onto SL(2,R).
    pub fn normalized(m: &Mat2<f64>) -> Result<Self> {
        let det = m.det();
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self(m.scale(1.0 / det.sqrt())))
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(Mat2::new(c, -s, s, c))
    }

    pub fn matrix(&self) -> &Mat2<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> Mat2<f64> {
        self.0
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Self {
        Self(self.0.adjugate())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.matmul(&other.0))
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.0.max_diff(&Mat2::identity())
    }
}

/// `(a f + b) / (c f + d)` for a real `f`.
pub fn mobius_act(g: &Mat2<f64>, f: f64) -> Result<f64> {
    let den = g.m[1][0] * f + g.m[1][1];
    if den == 0.0 {
        return Err(Error::MobiusSingularity);
    }
    Ok((g.m[0][0] * f + g.m[0][1]) / den)
}

/// Möbius action on a jet with constant coefficients.
pub fn mobius_act_jet(g: &Mat2<f64>, f: &Jet) -> Result<Jet> {
    let num = f.scale(g.m[0][0]).add_scalar(g.m[0][1]);
    let den = f.scale(g.m[1][0]).add_scalar(g.m[1][1]);
    num.div(&den).map_err(|_| Error::MobiusSingularity)
}

/// Möbius action with `t`-dependent coefficients, all expanded as jets.
pub fn mobius_act_local(g: &Mat2<Jet>, f: &Jet) -> Result<Jet> {
    let num = &(g.a() * f) + g.b();
    let den = &(g.c() * f) + g.d();
    num.div(&den).map_err(|_| Error::MobiusSingularity)
}

/// `g X g^-1` with the inverse taken as the adjugate over the determinant.
pub fn adjoint_act(g: &GroupElement, x: &Mat2<f64>) -> Mat2<f64> {
    g.0.matmul(x).matmul(&g.0.adjugate())
}

pub fn commutator<T: Scalar>(x: &Mat2<T>, y: &Mat2<T>) -> Mat2<T> {
    x.commutator(y)
}

/// `2 tr(X Y)`.
pub fn trace_pair<T: Scalar>(x: &Mat2<T>, y: &Mat2<T>) -> T {
    x.trace_pair(y)
}

const EXP_SERIES_CUTOFF: f64 = 1e-4;

/// Closed-form exponential of a traceless real matrix:
/// `cosh(mu) I + sinh(mu)/mu X` with `mu^2 = -det X`.
pub fn exp_sl2(x: &Mat2<f64>) -> GroupElement {
    let z = -x.det();
    let (c, s) = if z.abs().sqrt() < EXP_SERIES_CUTOFF {
        // degree 8 in mu
        let c = 1.0 + z / 2.0 + z * z / 24.0 + z.powi(3) / 720.0 + z.powi(4) / 40320.0;
        let s = 1.0 + z / 6.0 + z * z / 120.0 + z.powi(3) / 5040.0 + z.powi(4) / 362880.0;
        (c, s)
    } else if z > 0.0 {
        let mu = z.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    } else {
        let w = (-z).sqrt();
        (w.cos(), w.sin() / w)
    };
    debug_assert!(x.trace().abs() <= 1e-12 * (1.0 + x.max_abs()), "exp_sl2 of a non-traceless matrix");
    GroupElement(Mat2::identity().scale(c) + x.scale(s))
}

/// Exponential of a jet-valued traceless matrix, expanded as jets.
pub fn exp_sl2_jet(x: &Mat2<Jet>) -> Result<Mat2<Jet>> {
    let order = x.order();
    let t0 = x.basepoint();
    let z = -x.det();
    let z0 = z.value();
    let (c, s) = if z0.abs() < 1.0 {
        // entire series in z = mu^2; extra terms cover the jet tail
        let n = order + 16;
        let mut cs = Vec::with_capacity(n);
        let mut ss = Vec::with_capacity(n);
        let mut fact = 1.0;
        for k in 0..n {
            if k > 0 {
                fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            cs.push(1.0 / fact);
            ss.push(1.0 / (fact * (2 * k + 1) as f64));
        }
        (z.horner(&cs), z.horner(&ss))
    } else if z0 > 0.0 {
        let mu = z.sqrt()?;
        let (sh, ch) = mu.sinh_cosh();
        (ch, sh.div(&mu)?)
    } else {
        let w = z.scale(-1.0).sqrt()?;
        let (sn, cs) = w.sin_cos();
        (cs, sn.div(&w)?)
    };
    let id = Mat2::<f64>::identity().lift(t0, order);
    Ok(id.scale_by(&c) + x.scale_by(&s))
}

fn check_gl(g: &Mat2<f64>) -> Result<f64> {
    let det = g.det();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(det)
}

/// 3x3 matrix of `N -> g N g^-1` on `(N^0, N^1, N^2)`; invariant under `g -> lambda g`.
pub fn adjoint_matrix_n(g: &Mat2<f64>) -> Result<[[f64; 3]; 3]> {
    let det = check_gl(g)?;
    let [[a, b], [c, d]] = g.m;
    let m = [[d * d, 2.0 * c * d, c * c], [b * d, a * d + b * c, a * c], [b * b, 2.0 * a * b, a * a]];
    Ok(m.map(|row| row.map(|x| x / det)))
}

/// 3x3 matrix of `A -> g A g^-1` on `(A_0, A_1, A_2)`; invariant under `g -> lambda g`.
pub fn adjoint_matrix_a(g: &Mat2<f64>) -> Result<[[f64; 3]; 3]> {
    let det = check_gl(g)?;
    let [[a, b], [c, d]] = g.m;
    let m = [[a * a, -a * b, b * b], [-2.0 * a * c, a * d + b * c, -2.0 * b * d], [c * c, -c * d, d * d]];
    Ok(m.map(|row| row.map(|x| x / det)))
}

/// Spinor pair built from `f` with `f' > 0`:
/// `s = (f, 1)/sqrt(f')`, `s_bar = (-1, f)/sqrt(f')`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor {
    pub s: [Jet; 2],
    pub s_bar: [Jet; 2],
}

impl Spinor {
    pub fn from_jet(fjet: &Jet) -> Result<Self> {
        if fjet.order() < 1 {
            return Err(Error::InsufficientOrder { need: 1, got: fjet.order() });
        }
        let fd = fjet.derivative();
        if fd.value() == 0.0 {
            return Err(Error::CriticalPoint);
        }
        if fd.value() < 0.0 {
            return Err(Error::InvalidArgument("spinors need f' > 0".into()));
        }
        let f = fjet.truncate(fd.order());
        let inv = fd.sqrt()?.recip()?;
        Ok(Self { s: [&f * &inv, inv.clone()], s_bar: [-&inv, &f * &inv] })
    }

    /// `s_bar s`, zero by construction.
    pub fn contraction(&self) -> Jet {
        &(&self.s_bar[0] * &self.s[0]) + &(&self.s_bar[1] * &self.s[1])
    }

    /// `(1/2) s s_bar`.
    pub fn outer_half(&self) -> Mat2<Jet> {
        let e = |i: usize, j: usize| (&self.s[i] * &self.s_bar[j]).scale(0.5);
        Mat2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_close(a: &Mat2<f64>, b: &Mat2<f64>, tol: f64) -> bool {
        a.max_diff(b) <= tol
    }

    #[test]
    fn commutation_relations() {
        let [t0, t1, t2] = upper_basis();
        assert_eq!(commutator(&t0, &t1), t0);
        assert_eq!(commutator(&t2, &t1), -t2.clone());
        assert_eq!(commutator(&t0, &t2), t1.scale(2.0));
    }

    #[test]
    fn dual_pairing_and_casimir() {
        let b = basis();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert_eq!(b.upper[i].trace_mul(&b.lower[j]), want);
                // gamma^{ij} = 2 tr T^i T^j
                assert_eq!(b.upper[i].trace_pair(&b.upper[j]), b.metric[i][j]);
            }
        }
        let cas = (0..3).fold(Mat2::zeros(), |acc, i| acc + b.upper[i].matmul(&b.lower[i]));
        assert!(mat_close(&cas, &Mat2::identity().scale(0.75), 0.0));
        // T_i = gamma_ij T^j
        for i in 0..3 {
            let li = (0..3).fold(Mat2::zeros(), |acc, j| acc + b.upper[j].scale(b.metric_inv[i][j]));
            assert_eq!(li, b.lower[i]);
        }
    }

    #[test]
    fn trace_pair_examples() {
        let [t0, t1, t2] = upper_basis();
        assert_eq!(trace_pair(&t1, &t1), 1.0);
        assert_eq!(t0.trace_mul(&t2), -1.0);
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius_act(&Mat2::identity(), 0.37).unwrap(), 0.37);
        let j = Mat2::new(0.0, -1.0, 1.0, 0.0);
        assert!((mobius_act(&j, 0.25).unwrap() + 4.0).abs() < 1e-15);
        assert_eq!(mobius_act(&j, 0.0), Err(Error::MobiusSingularity));
        let fj = Jet::var(0.0, 3).unwrap();
        assert_eq!(mobius_act_jet(&j, &fj), Err(Error::MobiusSingularity));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_sl2(&Mat2::zeros()), GroupElement::identity());
        let [t0, t1, t2] = upper_basis();
        let t = 0.8;
        let g = exp_sl2(&t1.scale(t));
        assert!(mat_close(g.matrix(), &Mat2::new((-t / 2.0).exp(), 0.0, 0.0, (t / 2.0).exp()), 1e-15));
        let th = 1.3;
        let r = exp_sl2(&(t0 + t2).scale(th));
        assert!(mat_close(r.matrix(), GroupElement::rotation(th).matrix(), 1e-15));
    }

    #[test]
    fn exp_small_argument_branch() {
        let [t0, t1, _] = upper_basis();
        let x = t0.scale(3e-5) + t1.scale(-4e-5);
        let g = exp_sl2(&x);
        assert!((g.det() - 1.0).abs() < 1e-14);
        let back = exp_sl2(&x.scale(-1.0));
        assert!(g.compose(&back).distance_to_identity() < 1e-15);
    }

    #[test]
    fn adjoint_matrices_identity_and_singular() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(adjoint_matrix_n(&Mat2::identity()).unwrap(), id);
        assert_eq!(adjoint_matrix_a(&Mat2::identity()).unwrap(), id);
        let sing = Mat2::new(1.0, 2.0, 2.0, 4.0);
        assert_eq!(adjoint_matrix_n(&sing), Err(Error::SingularMatrix));
        assert_eq!(adjoint_matrix_a(&sing), Err(Error::SingularMatrix));
    }

    #[test]
    fn group_element_validation() {
        assert!(matches!(GroupElement::new(2.0, 0.0, 0.0, 1.0), Err(Error::NotUnimodular { .. })));
        let g = GroupElement::new(2.0, 3.0, 1.0, 2.0).unwrap();
        assert_eq!(g.compose(&g.inverse()), GroupElement::identity());
        let n = GroupElement::normalized(&Mat2::new(2.0, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(n, GroupElement::identity());
    }

    #[test]
    fn adjoint_act_identity() {
        let x = Mat2::new(0.3, -1.2, 0.7, -0.3);
        assert_eq!(adjoint_act(&GroupElement::identity(), &x), x);
    }

    #[test]
    fn components_round_trip() {
        let x = Mat2::new(0.3, -1.2, 0.7, -0.3);
        for kind in [IndexKind::Upper, IndexKind::Lower] {
            let c = LieComponents::from_matrix(kind, &x);
            assert!(mat_close(&c.to_matrix(), &x, 1e-15));
        }
        let n = LieComponents::upper([1.0, 2.0, 3.0]);
        assert!(n.contract(&n).is_err());
    }
}
