//! Randomized verification checks and the deterministic report they feed.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::composite::{identity_suite, schwarzian_direct};
use crate::error::{Error, Result};
use crate::field::{AngleField, FieldSource};
use crate::gauge::{
    constant_gauge_closed_form, covariant_deriv_f, expansion_terms_of, gauged_schwarzian_of, gauged_schwarzian_scaled,
    winding, ConstantGauge, FourierGauge, GaugePath, GroupPath, PureGauge, ScaledGauge, TransformedField,
    TransformedGauge, CIRCLE, DEFAULT_LOOP_STEPS,
};
use crate::jet::Jet;
use crate::sampling::{Sampler, MIN_DENOMINATOR, MIN_SLOPE};
use crate::sl2::mobius_act_jet;

pub const DEFAULT_SEED: u64 = 42;
const ORDER: usize = 6;
const TRIES: usize = 1000;

/// Named tolerances with their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 9] = [
    ("identities", 1e-9),
    ("schwarzian", 1e-10),
    ("global_invariance", 1e-9),
    ("gauge_invariance", 1e-8),
    ("constant_gauge", 1e-9),
    ("expansion_order", 1.0),
    ("winding_lift", 0.5),
    ("winding_holonomy", 1e-6),
    ("winding_paper_integral", 1e-9),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            let known: Vec<&str> = self.0.keys().map(String::as_str).collect();
            return Err(Error::InvalidArgument(format!("unknown tolerance '{name}' (known: {})", known.join(", "))));
        }
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance '{name}' must be positive, got {value}")));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }
}

/// One row of the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &str, residuals: &[f64], tolerance: f64) -> Self {
        let max_residual =
            residuals.iter().copied().fold(0.0, |m: f64, r| if r.is_nan() { f64::NAN } else { m.max(r) });
        Self {
            check_name: name.to_string(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            cases: residuals.len(),
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Parameters of one randomized case, enough to replay it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseLog {
    pub check_name: String,
    pub index: usize,
    pub params: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub all_pass: bool,
    pub checks: Vec<CheckResult>,
    pub cases: Vec<CaseLog>,
}

impl Report {
    fn new(seed: u64, checks: Vec<CheckResult>, cases: Vec<CaseLog>) -> Self {
        let all_pass = checks.iter().all(|c| c.pass);
        Self { seed, all_pass, checks, cases }
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides every per-check case count when set.
    pub cases: Option<usize>,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, cases: None, tolerances: Tolerances::default() }
    }
}

impl SuiteConfig {
    fn count(&self, default: usize) -> usize {
        self.cases.unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        if self.cases == Some(0) {
            return Err(Error::InvalidArgument("--cases must be at least 1".into()));
        }
        Ok(())
    }
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    rng: Sampler,
    logs: Vec<CaseLog>,
}

impl Ctx<'_> {
    fn log(&mut self, check: &str, index: usize, params: Value) {
        self.logs.push(CaseLog { check_name: check.to_string(), index, params });
    }

    fn tol(&self, name: &str) -> f64 {
        self.cfg.tolerances.get(name)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn identity_checks(ctx: &mut Ctx) -> Result<Vec<CheckResult>> {
    let n = ctx.cfg.count(100);
    let mut suite = Vec::with_capacity(n);
    let mut exact = Vec::with_capacity(n);
    for i in 0..n {
        let case = ctx.rng.field_case(ORDER)?;
        let rep = identity_suite(&case.jet)?;
        suite.push(rep.max_relative());
        let named = ["tr f' f' = 1/2", "tr f'' f'' = S"]
            .iter()
            .map(|k| rep.get(k).expect("named identity present").relative())
            .fold(0.0, f64::max);
        let direct = schwarzian_direct(&case.jet)?;
        exact.push(named.max(rel(direct, rep.schwarzian)));
        ctx.log("identities", i, json!({ "t": case.t, "field": case.field.params() }));
    }
    Ok(vec![
        CheckResult::new("identities", &suite, ctx.tol("identities")),
        CheckResult::new("schwarzian", &exact, ctx.tol("schwarzian")),
    ])
}

fn global_invariance(ctx: &mut Ctx) -> Result<CheckResult> {
    let n = ctx.cfg.count(100);
    let mut res = Vec::with_capacity(n);
    for i in 0..n {
        let case = ctx.rng.field_case(ORDER)?;
        let (g, moved) = (0..TRIES)
            .find_map(|_| {
                let g = ctx.rng.group_element();
                let moved = mobius_act_jet(g.matrix(), &case.jet).ok()?;
                let c = g.matrix().m[1][0] * case.jet.value() + g.matrix().m[1][1];
                (c.abs() >= 0.1).then_some((g, moved))
            })
            .ok_or(Error::MobiusSingularity)?;
        res.push(rel(schwarzian_direct(&moved)?, schwarzian_direct(&case.jet)?));
        ctx.log("global_invariance", i, json!({ "t": case.t, "field": case.field.params(), "g": g.matrix().m }));
    }
    Ok(CheckResult::new("global_invariance", &res, ctx.tol("global_invariance")))
}

/// Points closer than this to a zero of the form factor `1 + 2 tr(A f)` are redrawn.
pub const MIN_FORM_FACTOR: f64 = 0.1;

/// Scaled difference of `S[A](f)` and `S[A'](f')` at `t`, or `None` near a pole, critical point, or gauge-singular point.
fn invariance_pair(a: &dyn GaugePath, f2: &dyn FieldSource, a2: &dyn GaugePath, t: f64, jet: &Jet) -> Option<f64> {
    let [_, den] = f2.homogeneous(t, 0).ok()?;
    if den.value().abs() < MIN_DENOMINATOR {
        return None;
    }
    let moved = f2.jet(t, ORDER).ok()?;
    if !moved.is_finite() {
        return None;
    }
    for (j, p) in [(jet, a), (&moved, a2)] {
        let slope = j.deriv(1).ok()?;
        let phi = covariant_deriv_f(j, p).ok()? / slope;
        if slope.abs() < MIN_SLOPE || phi.abs() < MIN_FORM_FACTOR {
            return None;
        }
    }
    let s = gauged_schwarzian_scaled(jet, a).ok()?;
    let s2 = gauged_schwarzian_scaled(&moved, a2).ok()?;
    Some((s2.value - s.value).abs() / s.scale.max(s2.scale))
}

fn gauge_invariance(ctx: &mut Ctx) -> Result<CheckResult> {
    let n = ctx.cfg.count(50);
    let points = 10;
    let mut res = Vec::with_capacity(n * points);
    let mut i = 0;
    let mut attempts = 0;
    while i < n {
        attempts += 1;
        if attempts > TRIES {
            return Err(Error::InvalidArgument("no well-conditioned gauge-invariance sample found".into()));
        }
        let sample = ctx.rng.field_case(ORDER)?.field;
        let field: Arc<dyn FieldSource> = Arc::new(sample.clone());
        let fourier = ctx.rng.fourier_gauge(2, 0.3);
        let path = ctx.rng.local_path(0.5);
        let a: Arc<dyn GaugePath> = Arc::new(fourier.clone());
        let g: Arc<dyn GroupPath> = Arc::new(path.clone());
        let a2 = TransformedGauge { g: g.clone(), inner: a.clone() };
        let f2 = TransformedField { g, inner: field.clone() };
        let mut ts = Vec::with_capacity(points);
        let mut found = Vec::with_capacity(points);
        for _ in 0..100 * points {
            let (t, jet) = ctx.rng.point_for(field.as_ref(), ORDER)?;
            if let Some(r) = invariance_pair(a.as_ref(), &f2, &a2, t, &jet) {
                found.push(r);
                ts.push(t);
                if ts.len() == points {
                    break;
                }
            }
        }
        // cases without enough regular points are redrawn whole
        if ts.len() < points {
            continue;
        }
        res.extend(found);
        ctx.log("gauge_invariance", i, json!({ "field": sample.params(), "potential": fourier, "g": path, "t": ts }));
        i += 1;
    }
    Ok(CheckResult::new("gauge_invariance", &res, ctx.tol("gauge_invariance")).with_note(
        "|S[A'](f') - S[A](f)| over max(1, |S|, 2 m^2), m the largest entry of the terms inside the trace; \
         points with |1 + 2 tr(A f)| < 0.1 are skipped",
    ))
}

fn constant_gauge(ctx: &mut Ctx) -> Result<CheckResult> {
    let n = ctx.cfg.count(20);
    let mut res = Vec::new();
    let mut index = 0;
    for sector in [-2.0, -1.0, 1.0, 3.0] {
        let a = ConstantGauge::dilation_sector(sector);
        for _ in 0..n {
            let case = (0..TRIES)
                .find_map(|_| {
                    let case = ctx.rng.field_case(ORDER).ok()?;
                    let d = case.jet.derivs();
                    ((d[1] - 2.0 * sector * d[0]).abs() >= MIN_FORM_FACTOR * d[1].abs()).then_some(case)
                })
                .ok_or(Error::GaugeSingular)?;
            let numeric = gauged_schwarzian_scaled(&case.jet, &a)?;
            let closed = constant_gauge_closed_form(&case.jet, sector)?;
            let t = Jet::var(case.t, ORDER)?;
            let oracle = schwarzian_direct(&(&t.scale(-2.0 * sector).exp() * &case.jet))?;
            let worst = (numeric.value - closed).abs().max((numeric.value - oracle).abs());
            res.push(worst / numeric.scale.max(closed.abs()).max(oracle.abs()));
            ctx.log("constant_gauge", index, json!({ "n": sector, "t": case.t, "field": case.field.params() }));
            index += 1;
        }
    }
    Ok(CheckResult::new("constant_gauge", &res, ctx.tol("constant_gauge")).with_note(
        "n in {-2, -1, 1, 3}; worst of numeric vs closed form and numeric vs S(e^{-2nt} f), \
         over the same scale as gauge_invariance",
    ))
}

/// Quadrature points for loop integrals of smooth periodic data.
pub const EXPANSION_POINTS: usize = 256;
pub const EXPANSION_EPS: f64 = 1e-2;
/// Coefficient bound for sampled expansion potentials.
pub const EXPANSION_POTENTIAL_SCALE: f64 = 0.5;

/// `\oint (S[eps A] - S - eps S1 - eps^2 S2) dt` by the trapezoid rule.
pub fn expansion_remainder(f: &AngleField, a: &FourierGauge, eps: f64, points: usize) -> Result<f64> {
    let scaled = ScaledGauge { inner: Arc::new(a.clone()), eps };
    let dt = CIRCLE / points as f64;
    let mut sum = 0.0;
    for k in 0..points {
        let t = k as f64 * dt;
        let cf = f.composite(t, 4)?;
        let s = cf.schwarzian()?;
        let (s1, s2) = expansion_terms_of(&cf, a)?;
        let full = gauged_schwarzian_of(&cf, &scaled)?;
        sum += full - s - eps * s1 - eps * eps * s2;
    }
    Ok(sum * dt)
}

/// Remainders at `eps`, `eps / 2`, `eps / 4` and the ratios built from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpansionRatio {
    pub remainders: [f64; 3],
    /// `r(eps) / r(eps / 2)`.
    pub plain: f64,
    /// `(r(eps) - 16 r(eps/2)) / (r(eps/2) - 16 r(eps/4))`: the quartic term cancels, cubic scaling gives 8.
    pub richardson: f64,
}

pub fn expansion_ratio(f: &AngleField, a: &FourierGauge, eps: f64) -> Result<ExpansionRatio> {
    let mut r = [0.0; 3];
    for (k, slot) in r.iter_mut().enumerate() {
        *slot = expansion_remainder(f, a, eps / f64::from(1u32 << k), EXPANSION_POINTS)?;
    }
    Ok(ExpansionRatio { remainders: r, plain: r[0] / r[1], richardson: (r[0] - 16.0 * r[1]) / (r[1] - 16.0 * r[2]) })
}

fn expansion_order(ctx: &mut Ctx) -> Result<CheckResult> {
    let n = ctx.cfg.count(10);
    let mut res = Vec::with_capacity(n);
    for i in 0..n {
        let f = ctx.rng.angle_field(2);
        let a = ctx.rng.fourier_gauge(2, EXPANSION_POTENTIAL_SCALE);
        let ratio = expansion_ratio(&f, &a, EXPANSION_EPS)?;
        res.push((ratio.richardson - 8.0).abs());
        ctx.log("expansion_order", i, json!({ "field": f, "potential": a, "ratio": ratio }));
    }
    Ok(CheckResult::new("expansion_order", &res, ctx.tol("expansion_order")).with_note(
        "residual is |rho - 8| for the Richardson ratio rho of remainders at eps = 1e-2, 5e-3, 2.5e-3; \
         the plain ratio r(eps)/r(eps/2) is logged per case",
    ))
}

fn winding_checks(ctx: &mut Ctx) -> Result<Vec<CheckResult>> {
    let mut lift = Vec::new();
    let mut hol = Vec::new();
    for m in -3i64..=3 {
        let w = winding(Arc::new(PureGauge::rotation(m as f64)), None, DEFAULT_LOOP_STEPS)?;
        lift.push(w.angle_lift.map_or(1.0, |l| (l - m).abs() as f64));
        hol.push(w.holonomy.distance_to_identity());
        ctx.log("winding", (m + 3) as usize, json!({ "m": m, "result": w }));
    }
    let mut literal = Vec::new();
    for (i, n) in [-2.0, -1.0, 1.0, 2.0, 3.0].into_iter().enumerate() {
        let w = winding(Arc::new(ConstantGauge::dilation_sector(n)), None, DEFAULT_LOOP_STEPS)?;
        literal.push((w.paper_value + 2.0 * n).abs());
        ctx.log("winding_paper_integral", i, json!({ "n": n, "result": w }));
    }
    Ok(vec![
        CheckResult::new("winding_lift", &lift, ctx.tol("winding_lift"))
            .with_note("rotation loops m = -3..3; residual |angle_lift - m|, 1 when undefined"),
        CheckResult::new("winding_holonomy", &hol, ctx.tol("winding_holonomy"))
            .with_note("max-norm distance of the loop holonomy from the identity at 4096 steps"),
        CheckResult::new("winding_paper_integral", &literal, ctx.tol("winding_paper_integral")).with_note(
            "A = -2n T^1 with h0 = 1: the literal integral gives -2n while the paper labels this sector n; \
             residual is |paper_value + 2n|, no normalization applied",
        ),
    ])
}

fn run<F>(cfg: &SuiteConfig, body: F) -> Result<Report>
where
    F: FnOnce(&mut Ctx) -> Result<Vec<CheckResult>>,
{
    cfg.validate()?;
    let mut ctx = Ctx { cfg, rng: Sampler::new(cfg.seed), logs: Vec::new() };
    let checks = body(&mut ctx)?;
    Ok(Report::new(cfg.seed, checks, ctx.logs))
}

/// Identities, invariances, expansion order, and winding.
pub fn run_verify(cfg: &SuiteConfig) -> Result<Report> {
    run(cfg, |ctx| {
        let mut checks = identity_checks(ctx)?;
        checks.push(global_invariance(ctx)?);
        checks.push(gauge_invariance(ctx)?);
        checks.push(constant_gauge(ctx)?);
        checks.push(expansion_order(ctx)?);
        checks.extend(winding_checks(ctx)?);
        Ok(checks)
    })
}

/// Local gauge invariance and the constant-gauge agreement.
pub fn run_gauge_check(cfg: &SuiteConfig) -> Result<Report> {
    run(cfg, |ctx| Ok(vec![gauge_invariance(ctx)?, constant_gauge(ctx)?]))
}

/// Cubic scaling of the expansion remainder.
pub fn run_expand(cfg: &SuiteConfig) -> Result<Report> {
    run(cfg, |ctx| Ok(vec![expansion_order(ctx)?]))
}

/// Winding checks alone.
pub fn run_winding(cfg: &SuiteConfig) -> Result<Report> {
    run(cfg, winding_checks)
}
