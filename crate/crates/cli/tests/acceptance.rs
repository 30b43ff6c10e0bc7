//! Acceptance criteria 1-9, one PASS/FAIL line each, judged against pinned tolerances.

use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

use schwarzian_core::dynamics::{
    closed_form_x, first_order_qsq, integrate_first_order, integrate_schwarzian, Grid, IntegratorOptions,
    SolutionFamily,
};
use schwarzian_core::sampling::Sampler;

const SEED: &str = "42";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_schwarzian")).args(args).output().expect("binary runs");
    (out, start.elapsed())
}

/// A report row judged against a pinned tolerance and case count, ignoring the row's own verdict.
fn row(report: &Value, name: &str, tol: f64, cases: u64) -> Outcome {
    let Some(c) = report["checks"].as_array().and_then(|cs| cs.iter().find(|c| c["check_name"] == name)) else {
        return outcome(false, format!("{name}: missing from report"));
    };
    let residual = c["max_residual"].as_f64().unwrap_or(f64::NAN);
    let n = c["cases"].as_u64().unwrap_or(0);
    outcome(residual < tol && n == cases, format!("{name} max={residual:.3e} tol={tol:e} cases={n}"))
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|p| p.pass);
    outcome(pass, parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join("; "))
}

fn regular_family(rng: &mut Sampler) -> SolutionFamily {
    loop {
        let (c, d) = (rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0));
        let (a, b) = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (a * d - b * c).abs() > 0.2 {
            return SolutionFamily::new(a, b, c, d, rng.uniform(0.25, 1.0)).expect("nondegenerate");
        }
    }
}

fn conservation() -> Outcome {
    let mut rng = Sampler::new(42);
    let grid = Grid::new(0.0, 10.0, 1e-3).expect("valid grid");
    let (mut drift, mut schwarzian, mut charges) = (0f64, 0f64, 0f64);
    for _ in 0..5 {
        let fam = regular_family(&mut rng);
        let d = fam.eval(0.0, 3).expect("regular at 0").derivs();
        let Ok(traj) = integrate_schwarzian([d[0], d[1], d[2], d[3]], &grid, &IntegratorOptions::default()) else {
            return outcome(false, format!("{fam:?} aborted"));
        };
        drift = drift.max(traj.drift().charges);
        schwarzian = traj.samples.iter().map(|s| (s.schwarzian + 0.5 * fam.qsq).abs()).fold(schwarzian, f64::max);
        let expect = fam.on_shell_charges().expect("hyperbolic");
        let got = traj.samples[0].charges();
        charges = (0..3).map(|i| (got[i] - expect[i]).abs()).fold(charges, f64::max);
    }
    let (out, _) = run(&["simulate", "--family", "1,0,0,1,1", "--t1", "10", "--dt", "1e-3", "--out", "/dev/null"]);
    let cli_ok = out.status.success();
    outcome(
        drift < 1e-6 && schwarzian < 1e-8 && charges < 1e-8 && cli_ok,
        format!(
            "charge drift={drift:.3e} |S+q^2/2|={schwarzian:.3e} on-shell={charges:.3e} cli exit={:?}",
            out.status.code()
        ),
    )
}

fn first_order() -> Outcome {
    let mut rng = Sampler::new(42);
    let grid = Grid::new(0.0, 5.0, 1e-3).expect("valid grid");
    let h = grid.step();
    let (mut err, mut n0_err, mut signs, mut done) = (0f64, 0f64, [0, 0], 0);
    while done < 20 {
        let (x0, v0, lambda) = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let exact: Result<Vec<f64>, _> =
            (0..=grid.steps()).map(|k| closed_form_x(x0, v0, lambda, grid.time(k))).collect();
        let Ok(exact) = exact else { continue };
        if exact.iter().any(|x| *x > 3.0) {
            continue;
        }
        let Ok(run) = integrate_first_order(x0, v0, lambda, &grid, &IntegratorOptions::default()) else {
            return outcome(false, format!("({x0}, {v0}, {lambda}) aborted"));
        };
        err = run.states.iter().zip(&exact).map(|(s, x)| (s.x - x).abs()).fold(err, f64::max);
        n0_err = run
            .states
            .windows(3)
            .map(|w| ((w[2].v - w[0].v) / (2.0 * h) * (-w[1].x).exp() - lambda).abs())
            .fold(n0_err, f64::max);
        signs[usize::from(first_order_qsq(x0, v0, lambda) > 0.0)] += 1;
        done += 1;
    }
    outcome(
        err < 1e-6 && n0_err < 1e-5 && signs[0] > 0 && signs[1] > 0,
        format!("max |x - x_exact|={err:.3e} max |N0 - lambda|={n0_err:.3e} q^2<0: {} q^2>0: {}", signs[0], signs[1]),
    )
}

fn winding_cli() -> Outcome {
    let (out, _) = run(&["winding", "--potential", "const:0,-2,0"]);
    let Ok(v) = serde_json::from_slice::<Value>(&out.stdout) else {
        return outcome(false, "winding output is not JSON");
    };
    let literal = v["paper_value"].as_f64().unwrap_or(f64::NAN);
    let noted = v["note"].as_str().is_some_and(|n| n.contains("winding number n"));
    outcome(
        (literal + 2.0).abs() < 1e-9 && noted && v["angle_lift"].is_null(),
        format!("cli const:0,-2,0 paper_value={literal} note={noted}"),
    )
}

fn main() -> ExitCode {
    let dir = std::env::temp_dir().join(format!("schwarzian-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    let path = |p: &Path| p.to_str().expect("utf-8 path").to_string();
    let (first, t_first) = run(&["verify", "--seed", SEED, "--out", &path(&a)]);
    let (second, t_second) = run(&["verify", "--seed", SEED, "--out", &path(&b)]);
    let bytes_a = std::fs::read(&a).unwrap_or_default();
    let bytes_b = std::fs::read(&b).unwrap_or_default();
    let report: Value = serde_json::from_slice(&bytes_a).unwrap_or(Value::Null);
    let _ = std::fs::remove_dir_all(&dir);
    let wall = t_first.max(t_second);

    let criteria: Vec<(&str, Outcome)> = vec![
        (
            "identity suite",
            all(vec![
                row(&report, "identities", 1e-9, 100),
                row(&report, "schwarzian", 1e-10, 100),
                outcome(wall < Duration::from_secs(5), format!("verify wall={:.2}s", wall.as_secs_f64())),
            ]),
        ),
        ("global invariance", row(&report, "global_invariance", 1e-9, 100)),
        (
            "gauge invariance",
            all(vec![
                row(&report, "gauge_invariance", 1e-8, 500),
                outcome(wall < Duration::from_secs(20), format!("verify wall={:.2}s", wall.as_secs_f64())),
            ]),
        ),
        ("constant-gauge triple agreement", row(&report, "constant_gauge", 1e-9, 80)),
        ("conservation", conservation()),
        ("first-order formulation", first_order()),
        ("expansion order", row(&report, "expansion_order", 1.0, 10)),
        (
            "topology",
            all(vec![
                row(&report, "winding_lift", 0.5, 7),
                row(&report, "winding_holonomy", 1e-6, 7),
                row(&report, "winding_paper_integral", 1e-9, 5),
                winding_cli(),
            ]),
        ),
        (
            "determinism",
            outcome(
                first.status.success()
                    && second.status.success()
                    && !bytes_a.is_empty()
                    && bytes_a == bytes_b
                    && wall < Duration::from_secs(60),
                format!(
                    "exit {:?}/{:?}, identical={}, wall={:.2}s",
                    first.status.code(),
                    second.status.code(),
                    bytes_a == bytes_b,
                    wall.as_secs_f64()
                ),
            ),
        ),
    ];

    let mut failed = 0;
    for (i, (name, o)) in criteria.iter().enumerate() {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{name}]: {verdict} ({})", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
