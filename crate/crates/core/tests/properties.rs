mod common;

use common::{default_fixture, packet, rel_diff};
use frachs::energy::{
    coercivity_bound, directional_derivative, energy_parts, evaluate_energy, gradient, lower_bound, negative_energy_witness,
};
use frachs::fracops::{
    left_derivative, left_integral, riesz_composition, right_derivative, right_integral, seminorm_alpha, sobolev_norm,
    FracOrder, Grid, SampledSignal,
};
use frachs::random::SignalSampler;
use frachs::spaces::{embedding_bounds, lambda_norm, x_norm};
use proptest::prelude::*;

fn grid() -> Grid<f64> {
    Grid::centered(1024, 32.0).unwrap()
}

fn max_abs_diff(a: &SampledSignal<f64>, b: &SampledSignal<f64>) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_linear(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64, alpha in 0.05..0.99f64) {
        let mut rng = SignalSampler::new(seed);
        let u = rng.zero_mean(grid(), 2, 60);
        let v = rng.zero_mean(grid(), 2, 60);
        let combo = u.scaled(a).add_scaled(b, &v).unwrap();
        let order = FracOrder::new(alpha).unwrap();
        type Op = fn(&SampledSignal<f64>, FracOrder<f64>) -> frachs::Result<SampledSignal<f64>>;
        let ops: [Op; 5] = [left_derivative, right_derivative, riesz_composition, left_integral, right_integral];
        // FFT roundoff at high modes is amplified by the symbol, so errors are
        // measured against the largest symbol value times the input size.
        let g = grid();
        let top = (0..g.len()).map(|k| g.frequency(k).abs()).fold(0.0, f64::max);
        let low = g.frequency(1);
        let input = a.abs() * u.sup_norm() + b.abs() * v.sup_norm();
        let powers = [alpha, alpha, 2.0 * alpha, -alpha, -alpha];
        for (op, power) in ops.into_iter().zip(powers) {
            let lhs = op(&combo, order).unwrap();
            let rhs = op(&u, order).unwrap().scaled(a).add_scaled(b, &op(&v, order).unwrap()).unwrap();
            let gain = top.powf(power).max(low.powf(power));
            prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * gain * input.max(1e-300));
        }
    }

    #[test]
    fn inverse_law_on_zero_mean_signals(seed in any::<u64>(), alpha in 0.05..0.999f64) {
        let u = SignalSampler::new(seed).zero_mean(grid(), 1, 200);
        let order = FracOrder::new(alpha).unwrap();
        let back = left_derivative(&left_integral(&u, order).unwrap(), order).unwrap();
        prop_assert!(max_abs_diff(&back, &u) <= 1e-8 * u.sup_norm());
    }

    #[test]
    fn symbol_product_and_parseval(seed in any::<u64>(), alpha in 0.05..0.999f64) {
        let u = SignalSampler::new(seed).band_limited(grid(), 1, 300);
        let order = FracOrder::new(alpha).unwrap();
        let one = riesz_composition(&u, order).unwrap();
        let two = right_derivative(&left_derivative(&u, order).unwrap(), order).unwrap();
        prop_assert!(max_abs_diff(&one, &two) <= 1e-10 * one.sup_norm().max(1e-300));
        let s = seminorm_alpha(&u, order);
        prop_assert!(rel_diff(s, left_derivative(&u, order).unwrap().norm_l2()) <= 1e-10);
    }

    #[test]
    fn reflection_duality(seed in any::<u64>(), alpha in 0.05..0.999f64) {
        let u = SignalSampler::new(seed).band_limited(grid(), 1, 300);
        let order = FracOrder::new(alpha).unwrap();
        let right = right_derivative(&u, order).unwrap();
        let mirrored = left_derivative(&u.reflect(), order).unwrap().reflect();
        prop_assert!(max_abs_diff(&right, &mirrored) <= 1e-10 * right.sup_norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sobolev_bound_holds(seed in any::<u64>()) {
        let fx = default_fixture();
        let mut rng = SignalSampler::new(seed);
        let u = if seed % 2 == 0 {
            let modes = 1 + rng.index(600);
            rng.band_limited(fx.scenario.grid, 1, modes)
        } else {
            packet(&mut rng, fx, 1.0)
        };
        prop_assert!(u.sup_norm() <= fx.constants.c_alpha * sobolev_norm(&u, fx.scenario.order));
    }

    #[test]
    fn x_norm_dominates_sobolev_norm(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(1.0);
        let mut rng = SignalSampler::new(seed);
        let amp = rng.uniform(0.01, 5.0);
        let u = packet(&mut rng, fx, amp);
        let x = x_norm(&u, prob.sampled_potential(), fx.scenario.order).unwrap();
        let h = sobolev_norm(&u, fx.scenario.order);
        prop_assert!(h * h <= fx.constants.x_equivalence_factor() * x * x);
        for lambda in [1.0, 3.0, 100.0] {
            prop_assert!(x <= lambda_norm(&u, prob.sampled_potential(), lambda, fx.scenario.order).unwrap());
        }
    }

    #[test]
    fn embedding_margins_nonnegative_and_monotone(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(1.0);
        let mut rng = SignalSampler::new(seed);
        let amp = rng.uniform(0.01, 5.0);
        let u = packet(&mut rng, fx, amp);
        let mut previous = f64::NEG_INFINITY;
        for factor in [1.0, 10.0, 100.0] {
            let lambda = factor * fx.constants.lambda_threshold;
            let r = embedding_bounds(&u, &fx.constants, prob.sampled_potential(), lambda, fx.scenario.order).unwrap();
            prop_assert!(r.holds(), "{r:?}");
            let worst = r.worst_margin();
            prop_assert!(worst >= previous);
            previous = worst;
        }
    }

    #[test]
    fn energy_dominates_lower_bound(seed in any::<u64>(), log_amp in -3.0..1.6f64) {
        let fx = default_fixture();
        let mut rng = SignalSampler::new(seed);
        let factor = [1.0, 10.0, 100.0][(seed % 3) as usize];
        let prob = fx.problem(factor);
        let u = packet(&mut rng, fx, 10f64.powf(log_amp));
        prop_assert!(evaluate_energy(&u, &prob).unwrap() >= lower_bound(&u, &prob).unwrap());
    }

    #[test]
    fn energy_positive_beyond_bound_root(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(1.0);
        let root = coercivity_bound(&prob).root();
        let mut rng = SignalSampler::new(seed);
        let u = packet(&mut rng, fx, 1.0);
        let norm = lambda_norm(&u, prob.sampled_potential(), prob.lambda(), prob.order()).unwrap();
        let u = u.scaled(root * rng.uniform(1.0, 3.0) / norm);
        prop_assert!(evaluate_energy(&u, &prob).unwrap() > 0.0);
    }

    #[test]
    fn derivative_matches_central_differences(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(10.0);
        let mut rng = SignalSampler::new(seed);
        let amp = rng.uniform(0.05, 2.0);
        let (u, phi) = common::sign_preserving_pair(&mut rng, fx, amp);
        let h = 1e-5;
        let fd = (evaluate_energy(&u.add_scaled(h, &phi).unwrap(), &prob).unwrap()
            - evaluate_energy(&u.add_scaled(-h, &phi).unwrap(), &prob).unwrap())
            / (2.0 * h);
        let exact = directional_derivative(&u, &phi, &prob).unwrap();
        prop_assert!(rel_diff(fd, exact) <= 1e-5, "{fd} vs {exact}");
    }

    #[test]
    fn gradient_represents_derivative(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(10.0);
        let mut rng = SignalSampler::new(seed);
        let amp = rng.uniform(0.05, 2.0);
        let u = packet(&mut rng, fx, amp);
        let phi = packet(&mut rng, fx, 1.0);
        let exact = directional_derivative(&u, &phi, &prob).unwrap();
        let riesz = gradient(&u, &prob).unwrap().inner(&phi).unwrap();
        prop_assert!(rel_diff(riesz, exact) <= 1e-8, "{riesz} vs {exact}");
    }

    #[test]
    fn derivative_along_u_is_norm_minus_pairing(seed in any::<u64>()) {
        let fx = default_fixture();
        let prob = fx.problem(2.0);
        let mut rng = SignalSampler::new(seed);
        let amp = rng.uniform(0.05, 2.0);
        let u = packet(&mut rng, fx, amp);
        let parts = energy_parts(&u, &prob).unwrap();
        let nl = prob.nonlinearity();
        let pairing: f64 = prob.grid().times().enumerate().map(|(i, t)| {
            let mut g = [0.0];
            nl.gradient(t, u.point(i), &mut g);
            g[0] * u.point(i)[0]
        }).sum::<f64>() * prob.grid().dt();
        let d = directional_derivative(&u, &u, &prob).unwrap();
        prop_assert!(rel_diff(d, parts.norm_sq() - pairing) <= 1e-10);
    }
}

#[test]
fn witness_energy_is_lambda_invariant() {
    let fx = default_fixture();
    let w = negative_energy_witness(&fx.problem(1.0)).unwrap();
    let base = evaluate_energy(&w.point(), &fx.problem(1.0)).unwrap();
    for factor in [10.0, 100.0, 1e4] {
        assert_eq!(evaluate_energy(&w.point(), &fx.problem(factor)).unwrap(), base);
        let again = negative_energy_witness(&fx.problem(factor)).unwrap();
        assert_eq!(again.scale, w.scale);
    }
}

/// Where `u` changes sign `W` is only `C^{1, p-1}`, so central differences
/// converge like `h^{p-1}` rather than `h^2`.
#[test]
fn central_differences_across_zero_converge_at_reduced_rate() {
    let fx = default_fixture();
    let prob = fx.problem(10.0);
    let grid = fx.scenario.grid;
    let u = SampledSignal::from_scalar_fn(grid, |t: f64| (t - 0.3) * (-(t * t)).exp()).unwrap();
    let phi = SampledSignal::from_scalar_fn(grid, |t: f64| (-(t - 0.2) * (t - 0.2)).exp()).unwrap();
    let exact = directional_derivative(&u, &phi, &prob).unwrap();
    let err = |h: f64| {
        let fd = (evaluate_energy(&u.add_scaled(h, &phi).unwrap(), &prob).unwrap()
            - evaluate_energy(&u.add_scaled(-h, &phi).unwrap(), &prob).unwrap())
            / (2.0 * h);
        (fd - exact).abs()
    };
    let (coarse, fine) = (err(1e-2), err(1e-4));
    let rate = (coarse / fine).log10() / 2.0;
    assert!(fine < coarse);
    assert!(rate > 0.3, "observed rate {rate}");
}
