use std::collections::VecDeque;

use serde::Serialize;

use crate::energy::{coercivity_bound, directional_derivative, energy_change, evaluate_energy, gradient, lambda_inner, Problem};
use crate::error::{Error, Result};
use crate::fracops::{shifted_riesz_inverse, SampledSignal};
use crate::random::SignalSampler;
use crate::scalar::Real;

use super::config::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartPoint {
    /// The negative-energy witness.
    Witness,
    /// The previous sweep solution.
    Warm,
    /// The unit bump, used when no negative-energy witness exists.
    Bump,
    /// Supplied by the caller.
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryEntry<T> {
    pub energy: T,
    pub grad_norm: T,
}

/// Output of a descent run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult<T> {
    #[serde(skip)]
    pub u: SampledSignal<T>,
    pub energy: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub start: StartPoint,
    pub start_energy: T,
    /// Global minimum of the coercivity bound; no iterate may go below it.
    pub floor: T,
    /// `max |I'(u) phi| / ||phi||_{L^2}` over random test directions.
    pub probe_residual: T,
    /// Same with `||phi||_lambda` in the denominator.
    pub probe_residual_lambda: T,
    pub history: Vec<HistoryEntry<T>>,
}

impl<T: Real> SolveResult<T> {
    pub fn lambda_norm(&self, prob: &Problem<T>) -> Result<T> {
        crate::spaces::lambda_norm(&self.u, prob.sampled_potential(), prob.lambda(), prob.order())
    }
}

fn inner<T: Real>(a: &[T], b: &[T], dt: T) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>() * dt
}

fn apply_mask<T: Real>(v: &mut [T], free: Option<&[bool]>, dim: usize) {
    if let Some(free) = free {
        for (i, &f) in free.iter().enumerate() {
            if !f {
                v[i * dim..(i + 1) * dim].iter_mut().for_each(|x| *x = T::zero());
            }
        }
    }
}

struct Pair<T> {
    s: Vec<T>,
    y: Vec<T>,
    rho: T,
}

/// `-H g` by the two-loop recursion, with `gamma P` as the initial inverse Hessian.
fn lbfgs_direction<T: Real>(g: &[T], memory: &VecDeque<Pair<T>>, dt: T, precondition: &impl Fn(&[T]) -> Result<Vec<T>>) -> Result<Vec<T>> {
    let mut q: Vec<T> = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for pair in memory.iter().rev() {
        let a = pair.rho * inner(&pair.s, &q, dt);
        q.iter_mut().zip(&pair.y).for_each(|(x, &y)| *x = *x - a * y);
        alphas.push(a);
    }
    q = precondition(&q)?;
    if let Some(last) = memory.back() {
        let gamma = inner(&last.s, &last.y, dt) / inner(&last.y, &precondition(&last.y)?, dt);
        q.iter_mut().for_each(|x| *x = *x * gamma);
    }
    for (pair, a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = pair.rho * inner(&pair.y, &q, dt);
        q.iter_mut().zip(&pair.s).for_each(|(x, &s)| *x = *x + (a - b) * s);
    }
    q.iter_mut().for_each(|x| *x = -*x);
    Ok(q)
}

/// Monotone L-BFGS descent on `I_lambda` from `start`. Entries with
/// `free[i] == false` stay at zero.
pub(crate) fn descend<T: Real>(
    prob: &Problem<T>,
    start: &SampledSignal<T>,
    start_kind: StartPoint,
    cfg: &SolverConfig,
    free: Option<&[bool]>,
) -> Result<SolveResult<T>> {
    cfg.validate()?;
    prob.require_threshold()?;
    let grid = *prob.grid();
    let dim = prob.dim();
    let dt = grid.dt();
    let tol = T::lit(cfg.grad_tol);
    let c1 = T::lit(cfg.armijo);
    let shrink = T::lit(cfg.shrink);

    let mut u = start.masked(free.unwrap_or(&vec![true; grid.len()]));
    let floor = coercivity_bound(prob).minimum();
    let floor_slack = T::lit(1e-9) * (floor.abs() + T::one());
    let mut energy = evaluate_energy(&u, prob)?;
    let start_energy = energy;
    let mut g = gradient(&u, prob)?;
    apply_mask(g.values_mut(), free, dim);
    let mut grad_norm = g.norm_l2();
    let mut history = vec![HistoryEntry { energy, grad_norm }];
    let mut memory: VecDeque<Pair<T>> = VecDeque::with_capacity(cfg.memory);
    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    let shift = cfg.precondition_shift.map(T::lit);
    let precondition = |v: &[T]| -> Result<Vec<T>> {
        match shift {
            Some(mu) => Ok(shifted_riesz_inverse(&SampledSignal::new(grid, dim, v.to_vec())?, prob.order(), mu)?.values().to_vec()),
            None => Ok(v.to_vec()),
        }
    };

    while iterations < cfg.max_iters {
        if grad_norm <= tol {
            stop = StopReason::Converged;
            break;
        }
        let mut accepted = None;
        for attempt in 0..2 {
            let steepest = attempt == 1 || memory.is_empty();
            let mut d = if steepest {
                precondition(g.values())?.into_iter().map(|x| -x).collect()
            } else {
                lbfgs_direction(g.values(), &memory, dt, &precondition)?
            };
            apply_mask(&mut d, free, dim);
            let mut slope = inner(g.values(), &d, dt);
            if !(slope < T::zero()) {
                memory.clear();
                d = g.values().iter().map(|&x| -x).collect();
                slope = -grad_norm * grad_norm;
            }
            let dir = SampledSignal::new(grid, dim, d)?;
            let b_ud = lambda_inner(&u, &dir, prob);
            let b_dd = lambda_inner(&dir, &dir, prob);
            let mut step = if memory.is_empty() && b_dd > T::zero() { -slope / b_dd } else { T::one() };
            for _ in 0..cfg.max_backtracks {
                let trial = u.add_scaled(step, &dir)?;
                let change = energy_change(&u, &trial, step, b_ud, b_dd, prob)?;
                if change < T::zero() && change <= c1 * step * slope {
                    accepted = Some((trial, change));
                    break;
                }
                step = step * shrink;
            }
            if accepted.is_some() {
                break;
            }
            memory.clear();
        }
        let Some((trial, change)) = accepted else {
            stop = StopReason::LineSearchFailed;
            break;
        };

        let mut g_new = gradient(&trial, prob)?;
        apply_mask(g_new.values_mut(), free, dim);
        if cfg.memory > 0 {
            let s: Vec<T> = trial.values().iter().zip(u.values()).map(|(&a, &b)| a - b).collect();
            let y: Vec<T> = g_new.values().iter().zip(g.values()).map(|(&a, &b)| a - b).collect();
            let sy = inner(&s, &y, dt);
            if sy > T::epsilon() * inner(&y, &y, dt).sqrt() * inner(&s, &s, dt).sqrt() {
                if memory.len() == cfg.memory {
                    memory.pop_front();
                }
                memory.push_back(Pair { s, y, rho: sy.recip() });
            }
        }
        u = trial;
        energy = energy + change;
        g = g_new;
        grad_norm = g.norm_l2();
        iterations += 1;
        history.push(HistoryEntry { energy, grad_norm });
        if energy < floor - floor_slack {
            return Err(Error::Divergence { energy: energy.as_f64(), floor: floor.as_f64() });
        }
    }
    if stop == StopReason::MaxIterations && grad_norm <= tol {
        stop = StopReason::Converged;
    }

    let energy = evaluate_energy(&u, prob)?;
    let (probe_residual, probe_residual_lambda) = probe(&u, prob, cfg, free)?;
    Ok(SolveResult {
        u,
        energy,
        grad_norm,
        iterations,
        converged: stop == StopReason::Converged,
        stop,
        start: start_kind,
        start_energy,
        floor,
        probe_residual,
        probe_residual_lambda,
        history,
    })
}

/// Random smooth test directions for residual checks, zeroed where `free` is false.
pub fn test_directions<T: Real>(prob: &Problem<T>, count: usize, seed: u64, free: Option<&[bool]>) -> Vec<SampledSignal<T>> {
    let mut rng = SignalSampler::new(seed);
    (0..count)
        .map(|_| {
            let phi = rng.band_limited(*prob.grid(), prob.dim(), 64);
            match free {
                Some(f) => phi.masked(f),
                None => phi,
            }
        })
        .collect()
}

fn probe<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>, cfg: &SolverConfig, free: Option<&[bool]>) -> Result<(T, T)> {
    let mut worst = (T::zero(), T::zero());
    for phi in test_directions(prob, cfg.probes, cfg.seed, free) {
        let l2 = phi.norm_l2();
        if !(l2 > T::zero()) {
            continue;
        }
        let r = directional_derivative(u, &phi, prob)?.abs();
        let nl = crate::spaces::lambda_norm(&phi, prob.sampled_potential(), prob.lambda(), prob.order())?;
        worst = (worst.0.max(r / l2), worst.1.max(r / nl));
    }
    Ok(worst)
}
