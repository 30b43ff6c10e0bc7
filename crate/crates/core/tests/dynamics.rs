//! Integrators checked against exact solutions.

use schwarzian_core::dynamics::{
    closed_form_x, first_order_qsq, integrate_first_order, integrate_schwarzian, noether_charges, Grid,
    IntegratorOptions, SolutionFamily,
};
use schwarzian_core::sampling::Sampler;

/// Hyperbolic family with `c, d > 0`, so no pole for `t >= 0`, and `q <= 1` keeping `f'` above the floor.
fn regular_family(rng: &mut Sampler) -> SolutionFamily {
    loop {
        let (c, d) = (rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0));
        let (a, b) = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (a * d - b * c).abs() > 0.2 {
            return SolutionFamily::new(a, b, c, d, rng.uniform(0.25, 1.0)).unwrap();
        }
    }
}

#[test]
fn rk4_tracks_exact_families() {
    let mut rng = Sampler::new(5);
    let grid = Grid::new(0.0, 10.0, 1e-3).unwrap();
    for _ in 0..4 {
        let fam = regular_family(&mut rng);
        let d = fam.eval(0.0, 3).unwrap().derivs();
        let traj = integrate_schwarzian([d[0], d[1], d[2], d[3]], &grid, &IntegratorOptions::default()).unwrap();
        let drift = traj.drift();
        assert!(drift.charges < 1e-6, "{fam:?}: charge drift {}", drift.charges);
        for s in traj.samples.iter().step_by(500) {
            let exact = fam.eval(s.t, 0).unwrap().value();
            assert!((s.f - exact).abs() < 1e-8 * exact.abs().max(1.0), "f at t = {}", s.t);
            assert!((s.schwarzian + 0.5 * fam.qsq).abs() < 1e-8);
        }
    }
}

#[test]
fn exponential_family_keeps_its_charges() {
    let fam = SolutionFamily::new(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
    let grid = Grid::new(0.0, 10.0, 1e-3).unwrap();
    let traj = integrate_schwarzian([1.0, 1.0, 1.0, 1.0], &grid, &IntegratorOptions::default()).unwrap();
    let last = traj.samples.last().unwrap();
    // f = e^t
    assert!((last.f / 10f64.exp() - 1.0).abs() < 1e-9);
    let expect = fam.on_shell_charges().unwrap();
    for (n, e) in last.charges().iter().zip(expect) {
        assert!((n - e).abs() < 1e-6 * e.abs().max(1.0));
    }
}

#[test]
fn on_shell_charges_match_jet_charges() {
    let mut rng = Sampler::new(11);
    let mut checked = 0;
    for _ in 0..50 {
        let fam = rng.family();
        let Some(expect) = fam.on_shell_charges() else { continue };
        let t = rng.uniform(-1.0, 1.0);
        let Ok(jet) = fam.eval(t, 4) else { continue };
        if jet.deriv(1).unwrap().abs() < 1e-3 {
            continue;
        }
        let n = noether_charges(&jet).unwrap().n;
        for i in 0..3 {
            assert!((n[i] - expect[i]).abs() < 1e-8 * expect[i].abs().max(1.0), "{fam:?} at {t}");
        }
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} hyperbolic samples");
}

#[test]
fn first_order_system_matches_closed_form() {
    let mut rng = Sampler::new(3);
    let grid = Grid::new(0.0, 5.0, 1e-3).unwrap();
    let h = grid.step();
    let (mut positive, mut negative, mut done) = (0, 0, 0);
    while done < 20 {
        let (x0, v0, lambda) = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let exact: Result<Vec<f64>, _> =
            (0..=grid.steps()).map(|k| closed_form_x(x0, v0, lambda, grid.time(k))).collect();
        let Ok(exact) = exact else { continue };
        if exact.iter().any(|x| *x > 3.0) {
            continue;
        }
        let run = integrate_first_order(x0, v0, lambda, &grid, &IntegratorOptions::default()).unwrap();
        let err = run.states.iter().zip(&exact).map(|(s, x)| (s.x - x).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "({x0}, {v0}, {lambda}): {err}");
        // N^0 from a central difference of v: v' = lambda e^x
        for w in run.states.windows(3).step_by(97) {
            let n0 = (w[2].v - w[0].v) / (2.0 * h) * (-w[1].x).exp();
            assert!((n0 - lambda).abs() < 1e-5);
        }
        if first_order_qsq(x0, v0, lambda) > 0.0 {
            positive += 1;
        } else {
            negative += 1;
        }
        done += 1;
    }
    assert!(positive > 0 && negative > 0, "both signs of q^2 sampled");
}

#[test]
fn free_particle_moves_linearly() {
    let grid = Grid::new(0.0, 2.0, 1e-2).unwrap();
    let run = integrate_first_order(0.0, 1.0, 0.0, &grid, &IntegratorOptions::default()).unwrap();
    for (k, s) in run.states.iter().enumerate() {
        assert!((s.x - grid.time(k)).abs() < 1e-12);
    }
}
