//! Dynamics of the action built from the Schwarzian: exact solutions, the
//! conserved charges of the global symmetry, a fourth-order integrator for
//! the equation of motion, and the first-order (exponential force)
//! formulation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::composite::CompositeField;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sl2::{IndexKind, LieComponents, Mat2};

/// Below this `|q^2|` the family switches to its Möbius-of-`t` limit.
pub const LIMIT_BRANCH_QSQ: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Hyperbolic,
    Trigonometric,
    Limit,
}

/// `f = (a E + b/E) / (c E + d/E)` with `E = exp(q t / 2)`.
///
/// For `q^2 < 0` the real combination `(a cos + b sin)/(c cos + d sin)` of
/// `w t / 2` with `w^2 = -q^2` is used. For `q^2 = 0` the parameters are read
/// as the Möbius map `(a t + b)/(c t + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub qsq: f64,
}

impl SolutionFamily {
    pub fn new(a: f64, b: f64, c: f64, d: f64, qsq: f64) -> Result<Self> {
        if ![a, b, c, d, qsq].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if a * d - b * c == 0.0 {
            return Err(Error::DegenerateMobius);
        }
        Ok(Self { a, b, c, d, qsq })
    }

    pub fn branch(&self) -> Branch {
        if self.qsq.abs() < LIMIT_BRANCH_QSQ {
            Branch::Limit
        } else if self.qsq > 0.0 {
            Branch::Hyperbolic
        } else {
            Branch::Trigonometric
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Numerator and denominator jets.
    pub fn homogeneous(&self, t: f64, order: usize) -> Result<[Jet; 2]> {
        let tj = Jet::var(t, order.max(1))?.truncate(order);
        let (u, v) = match self.branch() {
            Branch::Hyperbolic => {
                let e = tj.scale(0.5 * self.qsq.sqrt()).exp();
                let ei = e.recip()?;
                (e, ei)
            }
            Branch::Trigonometric => {
                let (s, c) = tj.scale(0.5 * (-self.qsq).sqrt()).sin_cos();
                (c, s)
            }
            Branch::Limit => (tj, Jet::constant(t, 1.0, order)),
        };
        let num = &u.scale(self.a) + &v.scale(self.b);
        let den = &u.scale(self.c) + &v.scale(self.d);
        Ok([num, den])
    }

    pub fn eval(&self, t: f64, order: usize) -> Result<Jet> {
        let [num, den] = self.homogeneous(t, order)?;
        num.div(&den).map_err(|_| Error::Pole { t })
    }

    /// Constant value of the Schwarzian along the solution.
    pub fn schwarzian(&self) -> f64 {
        -0.5 * self.qsq
    }

    /// `(N^0, N^1, N^2)` on shell, for the hyperbolic branch.
    pub fn on_shell_charges(&self) -> Option<[f64; 3]> {
        if self.branch() != Branch::Hyperbolic {
            return None;
        }
        let q = self.qsq.sqrt();
        let det = self.det();
        Some([
            -2.0 * self.c * self.d * q / det,
            -(self.a * self.d + self.b * self.c) * q / det,
            -2.0 * self.a * self.b * q / det,
        ])
    }
}

pub fn family_eval(fam: &SolutionFamily, t: f64, order: usize) -> Result<Jet> {
    fam.eval(t, order)
}

/// Noether charges `N^i` and the algebra element `N = N^i T_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Charges {
    pub n: [f64; 3],
    pub matrix: Mat2<f64>,
}

impl Charges {
    pub fn components(&self) -> LieComponents {
        LieComponents::upper(self.n)
    }
}

/// Charges from `f` and its first three derivatives.
pub fn charges_from_derivatives(f: f64, f1: f64, f2: f64, f3: f64) -> [f64; 3] {
    let n0 = f3 / (f1 * f1) - f2 * f2 / (f1 * f1 * f1);
    let n1 = n0 * f - f2 / f1;
    let n2 = n0 * f * f - 2.0 * f2 * f / f1 + 2.0 * f1;
    [n0, n1, n2]
}

pub fn noether_charges(fjet: &Jet) -> Result<Charges> {
    if fjet.order() < 3 {
        return Err(Error::InsufficientOrder { need: 3, got: fjet.order() });
    }
    let d = fjet.derivs();
    if d[1] == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let n = charges_from_derivatives(d[0], d[1], d[2], d[3]);
    let cf = CompositeField::from_jet(fjet)?;
    let s = cf.schwarzian()?;
    let matrix = cf.at(2)? + cf.at(0)?.scale(2.0 * s);
    Ok(Charges { n, matrix })
}

/// `d/dt (f'''/f'^2 - f''^2/f'^3)`.
pub fn eom_residual(fjet: &Jet) -> Result<f64> {
    if fjet.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, got: fjet.order() });
    }
    let f1 = fjet.derivative();
    if f1.value() == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let f2 = f1.derivative();
    let f3 = f2.derivative();
    let inv = f1.recip()?;
    let inv2 = &inv * &inv;
    let n0 = &(&f3 * &inv2) - &(&(&f2 * &f2) * &(&inv2 * &inv));
    n0.deriv(1)
}

/// `N^i A_i` for upper-index charges and lower-index potential components.
pub fn coupling(charges: &Charges, a: &LieComponents) -> Result<f64> {
    if a.kind != IndexKind::Lower {
        return Err(Error::InvalidArgument("potential components must be lower-index".into()));
    }
    charges.components().contract(a)
}

/// Uniform time grid `t0, t0 + h, ..., t1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl Grid {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && dt.is_finite()) {
            return Err(Error::NonFinite);
        }
        if dt <= 0.0 {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if t1 <= t0 {
            return Err(Error::InvalidArgument(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        Ok(Self { t0, t1, dt })
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    /// Step actually taken so that the grid ends exactly on `t1`.
    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps() {
            self.t1
        } else {
            self.t0 + k as f64 * self.step()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Abort when `|f'|` drops below this.
    pub derivative_floor: f64,
    /// Abort when `exp(x)` exceeds this in the first-order system.
    pub blowup_bound: f64,
    /// Value of `f` at `t0` for the quadrature of `exp(x)`.
    pub quadrature_origin: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { derivative_floor: 1e-8, blowup_bound: 1e12, quadrature_origin: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
    #[serde(rename = "N1")]
    pub n1: f64,
    #[serde(rename = "N2")]
    pub n2: f64,
    pub schwarzian: f64,
}

impl Sample {
    pub fn from_derivatives(t: f64, f: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let [n0, n1, n2] = charges_from_derivatives(f, f1, f2, f3);
        let r = f2 / f1;
        Self { t, f, f1, f2, f3, n0, n1, n2, schwarzian: f3 / f1 - 1.5 * r * r }
    }

    pub fn charges(&self) -> [f64; 3] {
        [self.n0, self.n1, self.n2]
    }

    /// Values in the order of the CSV header.
    pub fn values(&self) -> [f64; 9] {
        [self.t, self.f, self.f1, self.f2, self.f3, self.n0, self.n1, self.n2, self.schwarzian]
    }
}

pub const TRAJECTORY_HEADER: &str = "t,f,f1,f2,f3,N0,N1,N2,schwarzian";

/// Shortest round-trip decimal, switching to exponent form at extreme magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

/// Largest deviation of the charges and the Schwarzian from their initial values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub charges: f64,
    pub schwarzian: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn drift(&self) -> Drift {
        let Some(first) = self.samples.first() else {
            return Drift { charges: 0.0, schwarzian: 0.0 };
        };
        let n0 = first.charges();
        self.samples.iter().fold(Drift { charges: 0.0, schwarzian: 0.0 }, |acc, s| {
            let dn = (0..3).map(|i| (s.charges()[i] - n0[i]).abs()).fold(0.0, f64::max);
            Drift {
                charges: acc.charges.max(dn),
                schwarzian: acc.schwarzian.max((s.schwarzian - first.schwarzian).abs()),
            }
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for s in &self.samples {
            let row: Vec<String> = s.values().iter().map(|x| format_number(*x)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("samples are finite")
    }
}

fn schwarzian_rhs(y: [f64; 4]) -> [f64; 4] {
    let [_, f1, f2, f3] = y;
    // fourth derivative from d/dt S = 0
    let f4 = 4.0 * f2 * f3 / f1 - 3.0 * f2 * f2 * f2 / (f1 * f1);
    [f1, f2, f3, f4]
}

fn axpy(y: [f64; 4], h: f64, k: [f64; 4]) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

/// Classical RK4 for `(f, f', f'', f''')` with the fourth derivative solved
/// from the equation of motion `d/dt S = 0`.
pub fn integrate_schwarzian(init: [f64; 4], grid: &Grid, opts: &IntegratorOptions) -> Result<Trajectory> {
    if init.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = grid.steps();
    let h = grid.step();
    let check = |y: &[f64; 4], t: f64| {
        if y[1].abs() < opts.derivative_floor || !y[1].is_finite() {
            Err(Error::ApproachingCriticalPoint { t })
        } else {
            Ok(())
        }
    };
    let mut y = init;
    check(&y, grid.t0)?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample::from_derivatives(grid.t0, y[0], y[1], y[2], y[3]));
    for k in 0..n {
        let t = grid.time(k);
        let k1 = schwarzian_rhs(y);
        let y2 = axpy(y, 0.5 * h, k1);
        check(&y2, t + 0.5 * h)?;
        let k2 = schwarzian_rhs(y2);
        let y3 = axpy(y, 0.5 * h, k2);
        check(&y3, t + 0.5 * h)?;
        let k3 = schwarzian_rhs(y3);
        let y4 = axpy(y, h, k3);
        check(&y4, t + h)?;
        let k4 = schwarzian_rhs(y4);
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t1 = grid.time(k + 1);
        check(&y, t1)?;
        samples.push(Sample::from_derivatives(t1, y[0], y[1], y[2], y[3]));
    }
    Ok(Trajectory { samples })
}

/// State of the first-order formulation, with `f' = exp(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderState {
    pub x: f64,
    pub v: f64,
    pub f: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstOrderRun {
    pub trajectory: Trajectory,
    pub states: Vec<FirstOrderState>,
}

/// `q^2 = v0^2 - 2 lambda exp(x0)`.
pub fn first_order_qsq(x0: f64, v0: f64, lambda: f64) -> f64 {
    v0 * v0 - 2.0 * lambda * x0.exp()
}

/// RK4 for `x'' = lambda exp(x)`, with `f` from trapezoid quadrature of `exp(x)`.
pub fn integrate_first_order(
    x0: f64,
    v0: f64,
    lambda: f64,
    grid: &Grid,
    opts: &IntegratorOptions,
) -> Result<FirstOrderRun> {
    if ![x0, v0, lambda].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = grid.steps();
    let h = grid.step();
    let rhs = |x: f64, v: f64, t: f64| -> Result<(f64, f64)> {
        let ex = x.exp();
        if ex.is_nan() || ex > opts.blowup_bound {
            return Err(Error::BlowUp { t, bound: opts.blowup_bound });
        }
        Ok((v, lambda * ex))
    };
    let sample = |t: f64, s: &FirstOrderState| {
        let ex = s.x.exp();
        Sample::from_derivatives(t, s.f, ex, s.v * ex, (s.v * s.v + lambda * ex) * ex)
    };

    let mut st = FirstOrderState { x: x0, v: v0, f: opts.quadrature_origin, lambda };
    rhs(st.x, st.v, grid.t0)?;
    let mut states = Vec::with_capacity(n + 1);
    let mut samples = Vec::with_capacity(n + 1);
    states.push(st);
    samples.push(sample(grid.t0, &st));
    for k in 0..n {
        let t = grid.time(k);
        let (a1, b1) = rhs(st.x, st.v, t)?;
        let (a2, b2) = rhs(st.x + 0.5 * h * a1, st.v + 0.5 * h * b1, t + 0.5 * h)?;
        let (a3, b3) = rhs(st.x + 0.5 * h * a2, st.v + 0.5 * h * b2, t + 0.5 * h)?;
        let (a4, b4) = rhs(st.x + h * a3, st.v + h * b3, t + h)?;
        let x = st.x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        let v = st.v + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        let t1 = grid.time(k + 1);
        rhs(x, v, t1)?;
        let f = st.f + 0.5 * h * (st.x.exp() + x.exp());
        st = FirstOrderState { x, v, f, lambda };
        states.push(st);
        samples.push(sample(t1, &st));
    }
    Ok(FirstOrderRun { trajectory: Trajectory { samples }, states })
}

/// Closed-form solution of `x'' = lambda exp(x)`:
/// `x(t) = x0 - 2 log(cosh(q t/2) - (v0/q) sinh(q t/2))`, equivalent to the
/// logarithmic form `x0 + q t - 2 log(1 + e^{qt} + (v0/q)(1 - e^{qt})) + log 4`
/// but valid for imaginary `q` and finite as `q -> 0`.
pub fn closed_form_x(x0: f64, v0: f64, lambda: f64, t: f64) -> Result<f64> {
    let qsq = first_order_qsq(x0, v0, lambda);
    let z = 0.25 * qsq * t * t;
    let (c, s_over_q) = if z.abs() < 1e-8 {
        (1.0 + z / 2.0 + z * z / 24.0, 0.5 * t * (1.0 + z / 6.0 + z * z / 120.0))
    } else if qsq > 0.0 {
        let q = qsq.sqrt();
        ((0.5 * q * t).cosh(), (0.5 * q * t).sinh() / q)
    } else {
        let w = (-qsq).sqrt();
        ((0.5 * w * t).cos(), (0.5 * w * t).sin() / w)
    };
    let arg = c - v0 * s_over_q;
    if !arg.is_finite() || arg <= 0.0 {
        return Err(Error::BlowUp { t, bound: f64::INFINITY });
    }
    Ok(x0 - 2.0 * arg.ln())
}
