//! The nilpotent composite field built from `f` and `f'`, the Schwarzian
//! derivative, and the trace identities relating the two.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sl2::Mat2;

/// `-(1/(2 f')) [[f, -f^2], [1, -f]]` as a matrix of jets.
///
/// The jets carry one order less than the input, since `f'` enters.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeField {
    matrix: Mat2<Jet>,
}

impl CompositeField {
    pub fn from_jet(fjet: &Jet) -> Result<Self> {
        if fjet.order() < 1 {
            return Err(Error::InsufficientOrder { need: 1, got: fjet.order() });
        }
        let one = Jet::constant(fjet.basepoint(), 1.0, fjet.order());
        Self::from_homogeneous(fjet, &one)
    }

    /// Builds the field from a homogeneous pair with `f = phi1 / phi2`.
    ///
    /// The matrix is `-(1/(2W)) [[phi1 phi2, -phi1^2], [phi2^2, -phi1 phi2]]`
    /// with Wronskian `W = phi1' phi2 - phi1 phi2'`. This stays regular where
    /// `f` itself has a pole, which is what periodic data on the circle needs.
    pub fn from_homogeneous(phi1: &Jet, phi2: &Jet) -> Result<Self> {
        let order = phi1.order().min(phi2.order());
        if order < 1 {
            return Err(Error::InsufficientOrder { need: 1, got: order });
        }
        let p1 = phi1.truncate(order);
        let p2 = phi2.truncate(order);
        let w = &(&p1.derivative() * &p2) - &(&p1 * &p2.derivative());
        if w.value() == 0.0 {
            return Err(Error::CriticalPoint);
        }
        let pre = w.recip()?.scale(-0.5);
        let p1 = p1.truncate(order - 1);
        let p2 = p2.truncate(order - 1);
        let p12 = &p1 * &p2;
        let m = Mat2::new(p12.clone(), -(&p1 * &p1), &p2 * &p2, -p12);
        Ok(Self { matrix: m.scale_by(&pre) })
    }

    pub fn matrix(&self) -> &Mat2<Jet> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat2<Jet> {
        self.matrix
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn basepoint(&self) -> f64 {
        self.matrix.basepoint()
    }

    /// Jet of the `k`-th time derivative.
    pub fn derivative(&self, k: usize) -> Result<Mat2<Jet>> {
        if k > self.order() {
            return Err(Error::InsufficientOrder { need: k, got: self.order() });
        }
        let mut m = self.matrix.clone();
        for _ in 0..k {
            m = m.derivative();
        }
        Ok(m)
    }

    /// Value of the `k`-th time derivative at the basepoint.
    pub fn at(&self, k: usize) -> Result<Mat2<f64>> {
        Ok(self.derivative(k)?.value())
    }

    /// `tr(f'')^2`, which equals the Schwarzian.
    pub fn schwarzian(&self) -> Result<f64> {
        let f2 = self.at(2)?;
        Ok(f2.trace_mul(&f2))
    }

    /// `tr(f'')^2` as a jet, order reduced by two.
    pub fn schwarzian_jet(&self) -> Result<Jet> {
        let f2 = self.derivative(2)?;
        Ok(f2.trace_mul(&f2))
    }
}

/// Schwarzian of the jet's function, kept as a jet of order `K - 3`.
pub fn schwarzian_jet(fjet: &Jet) -> Result<Jet> {
    if fjet.order() < 3 {
        return Err(Error::InsufficientOrder { need: 3, got: fjet.order() });
    }
    let f1 = fjet.derivative();
    if f1.value() == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let f2 = f1.derivative();
    let f3 = f2.derivative();
    let inv = f1.recip()?;
    let r = &f2 * &inv;
    Ok(&(&f3 * &inv) - &(&r * &r).scale(1.5))
}

/// `f'''/f' - (3/2)(f''/f')^2` at the basepoint.
pub fn schwarzian_direct(fjet: &Jet) -> Result<f64> {
    if fjet.order() < 3 {
        return Err(Error::InsufficientOrder { need: 3, got: fjet.order() });
    }
    let d = fjet.derivs();
    if d[1] == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let r = d[2] / d[1];
    Ok(d[3] / d[1] - 1.5 * r * r)
}

pub fn composite_field(fjet: &Jet) -> Result<CompositeField> {
    CompositeField::from_jet(fjet)
}

/// Schwarzian as the bilinear invariant `tr(f'')^2` of the composite field.
pub fn schwarzian_via_trace(fjet: &Jet) -> Result<f64> {
    if fjet.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, got: fjet.order() });
    }
    CompositeField::from_jet(fjet)?.schwarzian()
}

/// One identity: `|lhs - rhs|` and the magnitude it is judged against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
    pub scale: f64,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub schwarzian: f64,
    pub schwarzian_rate: f64,
    pub residuals: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(IdentityResidual::relative).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResidual> {
        self.residuals.iter().find(|r| r.name == name)
    }
}

pub const IDENTITY_NAMES: [&str; 12] = [
    "nilpotency",
    "tr f f",
    "tr f f'",
    "tr f' f''",
    "tr f''' f",
    "tr f' f' = 1/2",
    "tr f f'' = -1/2",
    "tr f'' f'' = S",
    "tr f'''' f = S",
    "tr f'''' f' = -3/2 dS",
    "tr f''''' f = 5/2 dS",
    "f'' - [f, f'''] + [f', f''] + 4 f S = 0",
];

/// Residuals of the composite-field identity suite. Needs a sixth-order jet.
pub fn identity_suite(fjet: &Jet) -> Result<IdentityReport> {
    if fjet.order() < 6 {
        return Err(Error::InsufficientOrder { need: 6, got: fjet.order() });
    }
    let cf = CompositeField::from_jet(fjet)?;
    let d: Vec<Mat2<f64>> = (0..=5).map(|k| cf.at(k)).collect::<Result<_>>()?;
    let s_jet = schwarzian_jet(fjet)?;
    Ok(identity_report(&d, s_jet.value(), s_jet.deriv(1)?))
}

/// Evaluates the suite on a derivative ladder `d[0..=5]` with Schwarzian `s` and rate `ds`.
pub(crate) fn identity_report(d: &[Mat2<f64>], s: f64, ds: f64) -> IdentityReport {
    let pair = |name, i: usize, j: usize, rhs: f64| {
        let lhs = d[i].trace_mul(&d[j]);
        let scale = 1f64.max(2.0 * d[i].max_abs() * d[j].max_abs()).max(rhs.abs());
        IdentityResidual { name, residual: (lhs - rhs).abs(), scale }
    };

    let sq = d[0].matmul(&d[0]);
    let mut residuals = vec![IdentityResidual {
        name: IDENTITY_NAMES[0],
        residual: sq.max_abs(),
        scale: 1f64.max(2.0 * d[0].max_abs().powi(2)),
    }];
    residuals.push(pair(IDENTITY_NAMES[1], 0, 0, 0.0));
    residuals.push(pair(IDENTITY_NAMES[2], 0, 1, 0.0));
    residuals.push(pair(IDENTITY_NAMES[3], 1, 2, 0.0));
    residuals.push(pair(IDENTITY_NAMES[4], 3, 0, 0.0));
    residuals.push(pair(IDENTITY_NAMES[5], 1, 1, 0.5));
    residuals.push(pair(IDENTITY_NAMES[6], 0, 2, -0.5));
    residuals.push(pair(IDENTITY_NAMES[7], 2, 2, s));
    residuals.push(pair(IDENTITY_NAMES[8], 4, 0, s));
    residuals.push(pair(IDENTITY_NAMES[9], 4, 1, -1.5 * ds));
    residuals.push(pair(IDENTITY_NAMES[10], 5, 0, 2.5 * ds));

    let terms = [d[2].clone(), d[0].commutator(&d[3]), d[1].commutator(&d[2]), d[0].scale(4.0 * s)];
    let lhs = terms[0].clone() - terms[1].clone() + terms[2].clone() + terms[3].clone();
    let scale = terms.iter().map(Mat2::max_abs).fold(1.0, f64::max);
    residuals.push(IdentityResidual { name: IDENTITY_NAMES[11], residual: lhs.max_abs(), scale });

    IdentityReport { schwarzian: s, schwarzian_rate: ds, residuals }
}
