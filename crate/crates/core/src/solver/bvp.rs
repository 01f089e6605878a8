use serde::Serialize;

use super::config::SolverConfig;
use super::descent::{descend, SolveResult, StartPoint};
use crate::energy::{bump, directional_derivative, negative_energy_witness, Problem};
use crate::error::{Error, Result};
use crate::fracops::{left_derivative, SampledSignal};
use crate::random::SignalSampler;
use crate::scalar::Real;

/// `true` at grid points strictly inside `I = (0, T)`.
pub fn interior_mask<T: Real>(prob: &Problem<T>) -> Vec<bool> {
    let i = prob.potential().vanishing;
    prob.grid().times().map(|t| i.contains_open(t)).collect()
}

fn require_normalized<T: Real>(prob: &Problem<T>) -> Result<()> {
    let i = prob.potential().vanishing;
    if i.start == T::zero() {
        Ok(())
    } else {
        Err(Error::NotNormalized { start: i.start.as_f64(), end: i.end.as_f64() })
    }
}

/// Minimizes `I_lambda` over zero extensions of functions on `I = (0, T)`.
///
/// Grid values outside the open interval, including both endpoints, are held
/// at zero. Since `L` vanishes on the closure of `I`, the result does not
/// depend on `lambda`.
pub fn solve_bvp<T: Real>(prob: &Problem<T>, cfg: &SolverConfig) -> Result<SolveResult<T>> {
    require_normalized(prob)?;
    let mask = interior_mask(prob);
    let (start, kind) = match negative_energy_witness(prob) {
        Ok(w) => (w.point(), StartPoint::Witness),
        Err(Error::WitnessNotFound { .. }) => (bump(prob, prob.potential().vanishing), StartPoint::Bump),
        Err(e) => return Err(e),
    };
    descend(prob, &start, kind, cfg, Some(&mask))
}

/// Smooth test functions supported in `I`: a bump times a random cosine polynomial.
pub fn interior_test_functions<T: Real>(prob: &Problem<T>, count: usize, seed: u64) -> Vec<SampledSignal<T>> {
    let i = prob.potential().vanishing;
    let base = bump(prob, i);
    let mut rng = SignalSampler::new(seed);
    let dim = prob.dim();
    (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..6 * dim).map(|_| rng.normal()).collect();
            let mut phi = base.clone();
            for (idx, t) in prob.grid().times().enumerate() {
                let x = ((t - i.start) / i.length()).as_f64() * std::f64::consts::PI;
                for c in 0..dim {
                    let poly: f64 = (0..6).map(|m| coeffs[m * dim + c] * (m as f64 * x).cos()).sum();
                    let v = &mut phi.values_mut()[idx * dim + c];
                    *v = *v * T::lit(poly);
                }
            }
            phi
        })
        .collect()
}

/// Weak-form residuals of the Dirichlet problem against test functions supported in `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvpResidual<T> {
    /// `max |int_R D^a u D^a phi - int (grad W(t, u), phi)| / ||phi||_{L^2}`, the
    /// Euler-Lagrange equation of the restricted functional.
    pub whole_line: T,
    /// The same pairing with the derivative product integrated over `(0, T)` only.
    pub interval: T,
}

pub fn bvp_weak_residual<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>, count: usize, seed: u64) -> Result<BvpResidual<T>> {
    let grid = *prob.grid();
    let i = prob.potential().vanishing;
    let du = left_derivative(u, prob.order())?;
    let inside: Vec<bool> = grid.times().map(|t| i.contains_closed(t)).collect();
    let mut out = BvpResidual { whole_line: T::zero(), interval: T::zero() };
    for phi in interior_test_functions(prob, count, seed) {
        let norm = phi.norm_l2();
        let whole = directional_derivative(u, &phi, prob)?;
        let dphi = left_derivative(&phi, prob.order())?;
        let outside: T = (0..grid.len())
            .filter(|&k| !inside[k])
            .map(|k| du.point(k).iter().zip(dphi.point(k)).map(|(&a, &b)| a * b).sum::<T>())
            .sum::<T>()
            * grid.dt();
        out.whole_line = out.whole_line.max(whole.abs() / norm);
        out.interval = out.interval.max((whole - outside).abs() / norm);
    }
    Ok(out)
}
