//! Self-check of the spectral operators on a given grid.

use serde::Serialize;

use super::operators::{left_derivative, left_integral, riesz_composition, right_derivative, seminorm_alpha, FracOrder};
use super::oracle::quadrature_left_derivative;
use super::signal::{Grid, SampledSignal};
use super::spectrum::{fft_forward, fft_inverse};
use crate::error::Result;
use crate::random::SignalSampler;

pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-3;
pub const INVERSE_TOL: f64 = 1e-8;
pub const LAW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the check could not be evaluated, or to explain a failure.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub n: usize,
    pub dt: f64,
    pub alpha: f64,
    pub trials: usize,
    pub pass: bool,
    pub checks: Vec<SelftestCheck>,
}

fn check(name: &'static str, worst: Result<f64>, tolerance: f64) -> SelftestCheck {
    match worst {
        Ok(w) => SelftestCheck { name, worst: w, tolerance, pass: w <= tolerance, detail: None },
        Err(e) => SelftestCheck { name, worst: f64::INFINITY, tolerance, pass: false, detail: Some(e.to_string()) },
    }
}

fn max_abs_diff(a: &SampledSignal<f64>, b: &SampledSignal<f64>) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Spectral left derivative of `exp(-t^2)` against the quadrature oracle,
/// as a max error over the middle half of the window relative to the oracle's
/// max there.
pub fn gaussian_oracle_error(grid: Grid<f64>, order: FracOrder<f64>) -> Result<f64> {
    let u = SampledSignal::from_scalar_fn(grid, |t| (-t * t).exp())?;
    let spectral = left_derivative(&u, order)?;
    let oracle = quadrature_left_derivative(&u, order)?;
    let n = grid.len();
    let (lo, hi) = (n / 4, 3 * n / 4);
    let scale = (lo..hi).map(|i| oracle.values()[i].abs()).fold(0.0, f64::max);
    let err = (lo..hi).map(|i| (spectral.values()[i] - oracle.values()[i]).abs()).fold(0.0, f64::max);
    Ok(relative(err, scale))
}

fn worst_over<F>(trials: usize, seed: u64, mut f: F) -> Result<f64>
where
    F: FnMut(&mut SignalSampler) -> Result<f64>,
{
    let mut rng = SignalSampler::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        worst = worst.max(f(&mut rng)?);
    }
    Ok(worst)
}

/// FFT round trip, inverse law, symbol product, Parseval and reflection on
/// `trials` random band-limited signals.
pub fn operator_laws(grid: Grid<f64>, order: FracOrder<f64>, trials: usize, seed: u64) -> Vec<SelftestCheck> {
    let modes = 300.min(grid.len() / 2 - 1).max(1);
    vec![
        check(
            "fft round trip",
            worst_over(trials, seed, |rng| {
                let u = rng.band_limited(grid, 1, modes);
                let back = fft_inverse(&fft_forward(&u)?)?;
                Ok(relative(max_abs_diff(&back, &u), u.sup_norm()))
            }),
            ROUND_TRIP_TOL,
        ),
        check(
            "inverse law",
            worst_over(trials, seed ^ 1, |rng| {
                let u = rng.zero_mean(grid, 1, modes);
                let back = left_derivative(&left_integral(&u, order)?, order)?;
                Ok(relative(max_abs_diff(&back, &u), u.sup_norm()))
            }),
            INVERSE_TOL,
        ),
        check(
            "symbol product",
            worst_over(trials, seed ^ 2, |rng| {
                let u = rng.band_limited(grid, 1, modes);
                let one = riesz_composition(&u, order)?;
                let two = right_derivative(&left_derivative(&u, order)?, order)?;
                Ok(relative(max_abs_diff(&one, &two), one.sup_norm()))
            }),
            LAW_TOL,
        ),
        check(
            "parseval",
            worst_over(trials, seed ^ 3, |rng| {
                let u = rng.band_limited(grid, 1, modes);
                let s = seminorm_alpha(&u, order);
                let d = left_derivative(&u, order)?.norm_l2();
                Ok(relative((s - d).abs(), s.max(d)))
            }),
            LAW_TOL,
        ),
        check(
            "reflection",
            worst_over(trials, seed ^ 4, |rng| {
                let u = rng.band_limited(grid, 1, modes);
                let right = right_derivative(&u, order)?;
                let mirrored = left_derivative(&u.reflect(), order)?.reflect();
                Ok(relative(max_abs_diff(&right, &mirrored), right.sup_norm()))
            }),
            LAW_TOL,
        ),
    ]
}

/// [`operator_laws`] plus the Gaussian oracle comparison and its behavior
/// under one refinement of the grid.
pub fn operator_selftest(grid: Grid<f64>, order: FracOrder<f64>, trials: usize, seed: u64) -> SelftestReport {
    let mut checks = operator_laws(grid, order, trials, seed);
    let coarse = gaussian_oracle_error(grid, order);
    checks.push(check("gaussian oracle", coarse.clone(), ORACLE_TOL));
    let fine = grid.refined().and_then(|g| gaussian_oracle_error(g, order));
    checks.push(match (&coarse, fine) {
        (Ok(c), Ok(f)) => {
            let pass = f < *c;
            SelftestCheck {
                name: "oracle refinement",
                worst: f / c,
                tolerance: 1.0,
                pass,
                detail: (!pass).then(|| format!("error {c:e} at dt, {f:e} at dt/2")),
            }
        }
        (Err(e), _) => check("oracle refinement", Err(e.clone()), 1.0),
        (_, Err(e)) => check("oracle refinement", Err(e), 1.0),
    });

    SelftestReport {
        n: grid.len(),
        dt: grid.dt(),
        alpha: order.alpha(),
        trials,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}
