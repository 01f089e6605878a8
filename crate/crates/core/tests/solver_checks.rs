mod common;

use std::sync::OnceLock;

use common::rel_diff;
use frachs::energy::{coercivity_bound, evaluate_energy, gradient, xi_norm, Problem};
use frachs::scenario::{NonlinearityPreset, Scenario, ScenarioParams};
use frachs::solver::{
    bvp_weak_residual, concentration_sweep, interior_mask, minimize, minimize_from, solve_bvp, uniform_bound_constant,
    SolverConfig, StartPoint, StopReason,
};
use frachs::spaces::EmbeddingConstants;
use frachs::Error;

struct Small {
    scenario: Scenario<f64>,
    constants: EmbeddingConstants<f64>,
}

impl Small {
    fn problem(&self, factor: f64) -> Problem<f64> {
        self.scenario.problem(self.constants, factor * self.constants.lambda_threshold).unwrap()
    }
}

fn small_params() -> ScenarioParams {
    ScenarioParams { grid_n: 1024, domain: 16.0, sobolev_trials: 40, ..ScenarioParams::default() }
}

fn small() -> &'static Small {
    static CELL: OnceLock<Small> = OnceLock::new();
    CELL.get_or_init(|| {
        let scenario = Scenario::build(small_params()).unwrap();
        let constants = scenario.constants().unwrap();
        Small { scenario, constants }
    })
}

fn zero_nonlinearity() -> (Scenario<f64>, EmbeddingConstants<f64>) {
    let sc = Scenario::build(ScenarioParams { nonlinearity: NonlinearityPreset::Zero, ..small_params() }).unwrap();
    let constants = small().constants;
    (sc, constants)
}

#[test]
fn minimizer_is_a_converged_negative_critical_point() {
    let fx = small();
    let prob = fx.problem(10.0);
    let r = minimize(&prob, &SolverConfig::default()).unwrap();
    assert!(r.converged, "{:?}", r.stop);
    assert_eq!(r.stop, StopReason::Converged);
    assert_eq!(r.start, StartPoint::Witness);
    assert!(r.energy < r.start_energy && r.energy < 0.0);
    assert!(r.energy >= r.floor);
    assert!(r.grad_norm <= 1e-8);
    assert!(rel_diff(r.energy, evaluate_energy(&r.u, &prob).unwrap()) <= 1e-12);
    let g = gradient(&r.u, &prob).unwrap();
    assert!(g.norm_l2() <= 1e-6);
    assert!(r.probe_residual <= 1e-7);
    assert!(r.history.windows(2).all(|w| w[1].energy <= w[0].energy));
    assert!(r.history.last().unwrap().energy < r.history[0].energy);
}

#[test]
fn zero_nonlinearity_converges_to_zero() {
    let (sc, constants) = zero_nonlinearity();
    let prob = sc.problem(constants, 3.0 * constants.lambda_threshold).unwrap();
    let r = minimize(&prob, &SolverConfig::default()).unwrap();
    assert_eq!(r.start, StartPoint::Bump);
    assert!(r.converged);
    assert!(r.u.sup_norm() <= 1e-6, "{}", r.u.sup_norm());
    assert!(r.energy.abs() <= 1e-12);
    assert_eq!(uniform_bound_constant(&prob), 0.0);
    assert_eq!(xi_norm(&prob).value, 0.0);
}

#[test]
fn zero_nonlinearity_bvp_is_zero() {
    let (sc, constants) = zero_nonlinearity();
    let prob = sc.problem(constants, 3.0 * constants.lambda_threshold).unwrap();
    let r = solve_bvp(&prob, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.u.sup_norm() <= 1e-6);
}

#[test]
fn runs_are_deterministic() {
    let fx = small();
    let prob = fx.problem(2.0);
    let cfg = SolverConfig { max_iters: 200, ..SolverConfig::default() };
    let a = minimize(&prob, &cfg).unwrap();
    let b = minimize(&prob, &cfg).unwrap();
    assert_eq!(a.u.values(), b.u.values());
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    let c = minimize(&prob, &SolverConfig { seed: 99, ..cfg }).unwrap();
    assert_eq!(a.u.values(), c.u.values());
    assert_ne!(a.probe_residual.to_bits(), c.probe_residual.to_bits());
}

#[test]
fn bvp_solution_vanishes_off_the_open_interval() {
    let fx = small();
    let prob = fx.problem(1.0);
    let r = solve_bvp(&prob, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.energy < 0.0);
    let mask = interior_mask(&prob);
    for ((t, v), free) in prob.grid().times().zip(r.u.values()).zip(&mask) {
        if !free {
            assert_eq!(*v, 0.0, "t = {t}");
        }
    }
    assert!(mask.iter().zip(prob.grid().times()).all(|(f, t)| *f == (t > 0.0 && t < 0.5)));
    let res = bvp_weak_residual(&r.u, &prob, 20, 3).unwrap();
    assert!(res.whole_line <= 1e-7, "{}", res.whole_line);
    assert!(res.interval >= res.whole_line);

    let other = solve_bvp(&fx.problem(40.0), &SolverConfig::default()).unwrap();
    assert_eq!(other.u.values(), r.u.values());
}

#[test]
fn bvp_needs_interval_starting_at_zero() {
    let sc: Scenario<f64> = Scenario::build(ScenarioParams { vanishing: (0.1, 0.5), ..small_params() }).unwrap();
    let constants = sc.constants().unwrap();
    let prob = sc.problem(constants, 2.0 * constants.lambda_threshold).unwrap();
    assert!(matches!(solve_bvp(&prob, &SolverConfig::default()), Err(Error::NotNormalized { .. })));
}

#[test]
fn restricted_level_dominates_free_level() {
    let fx = small();
    let cfg = SolverConfig::default();
    let bvp = solve_bvp(&fx.problem(1.0), &cfg).unwrap();
    for factor in [1.0, 5.0] {
        let free = minimize(&fx.problem(factor), &cfg).unwrap();
        assert!(free.energy <= bvp.energy);
        let from_bvp = minimize_from(&fx.problem(factor), &bvp.u, &cfg).unwrap();
        assert!(from_bvp.energy <= bvp.energy);
        assert_eq!(from_bvp.start, StartPoint::Given);
    }
}

#[test]
fn uniform_bound_against_root_finder() {
    let fx = small();
    let prob = fx.problem(1.0);
    let b = coercivity_bound(&prob);
    let (mut lo, mut hi) = (b.minimizer(), 1e6);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if b.value(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(rel_diff(uniform_bound_constant(&prob), 1.05 * lo) <= 1e-12);
    let xi = xi_norm(&prob).value;
    let closed = 1.05 * (2.0 * xi / (1.5 * fx.constants.theta0.powf(0.75))).powf(2.0);
    assert!(rel_diff(uniform_bound_constant(&prob), closed) <= 1e-12);
}

#[test]
fn sweep_rejects_bad_ladders() {
    let fx = small();
    let prob = fx.problem(1.0);
    let l = fx.constants.lambda_threshold;
    let cfg = SolverConfig::default();
    assert!(matches!(concentration_sweep(&prob, &[l, 2.0 * l], &cfg), Err(Error::SweepLadder)));
    assert!(matches!(concentration_sweep(&prob, &[l, 3.0 * l, 2.0 * l], &cfg), Err(Error::SweepLadder)));
    assert!(matches!(
        concentration_sweep(&prob, &[0.5 * l, 2.0 * l, 3.0 * l], &cfg),
        Err(Error::BelowThreshold { .. })
    ));
    assert!(SolverConfig { threads: 0, ..cfg }.validate().is_err());
}

#[test]
fn repeated_lambda_gives_identical_rows() {
    let fx = small();
    let prob = fx.problem(1.0);
    let l = 4.0 * fx.constants.lambda_threshold;
    let cfg = SolverConfig { warm_start: false, threads: 2, ..SolverConfig::default() };
    let rep = concentration_sweep(&prob, &[l, l, l], &cfg).unwrap();
    assert_eq!(rep.rows[0], rep.rows[1]);
    assert_eq!(rep.rows[1], rep.rows[2]);
}

#[test]
fn sweep_rows_and_trends() {
    let fx = small();
    let prob = fx.problem(1.0);
    let l = fx.constants.lambda_threshold;
    let lambdas = [2.0 * l, 10.0 * l, 100.0 * l];
    let warm = concentration_sweep(&prob, &lambdas, &SolverConfig::default()).unwrap();
    assert!(!warm.flagged(), "{:?}", warm.rows);
    let trends = warm.trends();
    assert!(trends.c_lambda_below_c_tilde && trends.norms_within_bound);
    assert!(trends.tail_mass_strictly_decreasing);
    assert!(warm.bvp_converged && warm.c_tilde < 0.0);
    for row in &warm.rows {
        assert!(row.converged && row.c_lambda <= warm.c_tilde && row.norm_lambda <= warm.uniform_bound);
        assert!(row.tail_mass >= 0.0 && row.tail_mass <= 1.0);
    }
    assert_eq!(warm.rows[0].start, Some(StartPoint::Witness));

    let cold = concentration_sweep(&prob, &lambdas, &SolverConfig { warm_start: false, threads: 3, ..SolverConfig::default() })
        .unwrap();
    assert!(cold.rows.iter().all(|r| r.start == Some(StartPoint::Witness)));
    for (a, b) in warm.rows.iter().zip(&cold.rows) {
        assert!(rel_diff(a.c_lambda, b.c_lambda) <= 1e-6, "{} vs {}", a.c_lambda, b.c_lambda);
    }
}

#[test]
fn preconditioner_changes_speed_not_minimum() {
    let prob = small().problem(10.0);
    let fast = minimize(&prob, &SolverConfig::default()).unwrap();
    let plain = minimize(&prob, &SolverConfig { precondition_shift: None, max_iters: 20_000, ..SolverConfig::default() }).unwrap();
    assert!(fast.converged && plain.converged);
    assert!(rel_diff(fast.energy, plain.energy) <= 1e-8, "{} vs {}", fast.energy, plain.energy);
    assert!(fast.iterations < plain.iterations);
}

#[test]
fn zero_nonlinearity_on_default_grid_reaches_sup_tolerance() {
    let sc: Scenario<f64> = Scenario::build(ScenarioParams { nonlinearity: NonlinearityPreset::Zero, sobolev_trials: 40, ..ScenarioParams::default() })
        .unwrap();
    let constants = sc.constants().unwrap();
    let prob = sc.problem(constants, 10.0 * constants.lambda_threshold).unwrap();
    let r = minimize(&prob, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.u.sup_norm() <= 1e-10, "{}", r.u.sup_norm());
}
