use std::thread;

use serde::Serialize;

use super::bvp::solve_bvp;
use super::config::SolverConfig;
use super::descent::{descend, SolveResult, StartPoint};
use crate::energy::{coercivity_bound, evaluate_energy, negative_energy_witness, Problem};
use crate::error::{Error, Result};
use crate::fracops::{sobolev_norm, SampledSignal};
use crate::scalar::Real;
use crate::spaces::lambda_norm;

/// Safety factor on the positive root of the coercivity bound.
pub const UNIFORM_BOUND_SAFETY: f64 = 1.05;

/// `1.05 (2 ||xi|| / (p theta_0^{p/2}))^{1/(2-p)}`: every `u` with
/// `I_lambda(u) <= 0` has `||u||_lambda` below it, for every `lambda >= Lambda`.
/// Zero when `xi = 0`.
pub fn uniform_bound_constant<T: Real>(prob: &Problem<T>) -> T {
    T::lit(UNIFORM_BOUND_SAFETY) * coercivity_bound(prob).root()
}

/// Solution of `minimize` from the witness, or from the unit bump when no
/// witness exists.
pub fn minimize<T: Real>(prob: &Problem<T>, cfg: &SolverConfig) -> Result<SolveResult<T>> {
    let (start, kind) = witness_start(prob)?;
    descend(prob, &start, kind, cfg, None)
}

/// Descent from a caller-supplied start.
pub fn minimize_from<T: Real>(prob: &Problem<T>, start: &SampledSignal<T>, cfg: &SolverConfig) -> Result<SolveResult<T>> {
    descend(prob, start, StartPoint::Given, cfg, None)
}

fn witness_start<T: Real>(prob: &Problem<T>) -> Result<(SampledSignal<T>, StartPoint)> {
    match negative_energy_witness(prob) {
        Ok(w) => Ok((w.point(), StartPoint::Witness)),
        Err(Error::WitnessNotFound { .. }) => Ok((crate::energy::bump(prob, prob.potential().vanishing), StartPoint::Bump)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub lambda: T,
    pub c_lambda: T,
    pub c_tilde: T,
    /// `int_{R \ J} |u|^2 / int_R |u|^2`.
    pub tail_mass: T,
    /// `int l |u|^2`.
    pub weighted_mass: T,
    /// `||u_lambda - u~||_alpha`.
    pub dist_alpha: T,
    pub norm_lambda: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub start: Option<StartPoint>,
    pub flags: Vec<String>,
}

impl<T> SweepRow<T> {
    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport<T> {
    pub lambda_threshold: T,
    pub c_tilde: T,
    pub bvp_grad_norm: T,
    pub bvp_iterations: usize,
    pub bvp_converged: bool,
    /// `||u~||_alpha`.
    pub bvp_norm_alpha: T,
    pub uniform_bound: T,
    pub rows: Vec<SweepRow<T>>,
    #[serde(skip)]
    pub bvp_solution: SampledSignal<T>,
    #[serde(skip)]
    pub solutions: Vec<Option<SampledSignal<T>>>,
}

impl<T: Real> SweepReport<T> {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(SweepRow::flagged)
    }

    pub fn trends(&self) -> SweepTrends {
        let pairs = |f: fn(&SweepRow<T>) -> T, strict: bool| {
            self.rows.windows(2).all(|w| if strict { f(&w[1]) < f(&w[0]) } else { f(&w[1]) <= f(&w[0]) })
        };
        SweepTrends {
            tail_mass_strictly_decreasing: pairs(|r| r.tail_mass, true),
            dist_alpha_nonincreasing: pairs(|r| r.dist_alpha, false),
            c_lambda_below_c_tilde: self.rows.iter().all(|r| r.c_lambda <= r.c_tilde && r.c_tilde < T::zero()),
            norms_within_bound: self.rows.iter().all(|r| r.norm_lambda <= self.uniform_bound),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepTrends {
    pub tail_mass_strictly_decreasing: bool,
    pub dist_alpha_nonincreasing: bool,
    pub c_lambda_below_c_tilde: bool,
    pub norms_within_bound: bool,
}

/// Solves the Dirichlet problem once and minimizes `I_lambda` along an ascending
/// `lambda` ladder, collecting the concentration diagnostics.
///
/// With `cfg.warm_start` each point starts from the lower-energy of the previous
/// solution and the witness; otherwise points run independently on up to
/// `cfg.threads` workers.
pub fn concentration_sweep<T: Real>(template: &Problem<T>, lambdas: &[T], cfg: &SolverConfig) -> Result<SweepReport<T>> {
    cfg.validate()?;
    if lambdas.len() < 3 || lambdas.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::SweepLadder);
    }
    let threshold = template.constants().lambda_threshold;
    if let Some(&low) = lambdas.iter().find(|&&l| l < threshold) {
        return Err(Error::BelowThreshold { lambda: low.as_f64(), threshold: threshold.as_f64() });
    }
    let problems = lambdas.iter().map(|&l| template.with_lambda(l)).collect::<Result<Vec<_>>>()?;
    let bvp = solve_bvp(&problems[0], cfg)?;
    let bound = uniform_bound_constant(template);
    let bvp_norm_alpha = sobolev_norm(&bvp.u, template.order());

    let outcomes: Vec<Result<SolveResult<T>>> = if cfg.warm_start {
        let mut previous: Option<SampledSignal<T>> = None;
        problems
            .iter()
            .map(|prob| {
                let out = warm_solve(prob, previous.as_ref(), cfg);
                if let Ok(r) = &out {
                    previous = Some(r.u.clone());
                }
                out
            })
            .collect()
    } else {
        parallel_solve(&problems, cfg)
    };

    let mut rows = Vec::with_capacity(lambdas.len());
    let mut solutions = Vec::with_capacity(lambdas.len());
    for (prob, outcome) in problems.iter().zip(outcomes) {
        let (row, u) = make_row(prob, outcome, &bvp, bound)?;
        rows.push(row);
        solutions.push(u);
    }
    Ok(SweepReport {
        lambda_threshold: threshold,
        c_tilde: bvp.energy,
        bvp_grad_norm: bvp.grad_norm,
        bvp_iterations: bvp.iterations,
        bvp_converged: bvp.converged,
        bvp_norm_alpha,
        uniform_bound: bound,
        rows,
        bvp_solution: bvp.u,
        solutions,
    })
}

fn warm_solve<T: Real>(prob: &Problem<T>, previous: Option<&SampledSignal<T>>, cfg: &SolverConfig) -> Result<SolveResult<T>> {
    let (witness, kind) = witness_start(prob)?;
    let start = match previous {
        Some(prev) if evaluate_energy(prev, prob)? < evaluate_energy(&witness, prob)? => (prev.clone(), StartPoint::Warm),
        _ => (witness, kind),
    };
    descend(prob, &start.0, start.1, cfg, None)
}

fn parallel_solve<T: Real>(problems: &[Problem<T>], cfg: &SolverConfig) -> Vec<Result<SolveResult<T>>> {
    let workers = cfg.threads.min(problems.len()).max(1);
    let mut slots: Vec<Option<Result<SolveResult<T>>>> = (0..problems.len()).map(|_| None).collect();
    for (chunk_probs, chunk_slots) in problems.chunks(workers).zip(slots.chunks_mut(workers)) {
        thread::scope(|scope| {
            for (prob, slot) in chunk_probs.iter().zip(chunk_slots.iter_mut()) {
                scope.spawn(move || *slot = Some(minimize(prob, cfg)));
            }
        });
    }
    slots.into_iter().map(|s| s.expect("every worker fills its slot")).collect()
}

fn make_row<T: Real>(
    prob: &Problem<T>,
    outcome: Result<SolveResult<T>>,
    bvp: &SolveResult<T>,
    bound: T,
) -> Result<(SweepRow<T>, Option<SampledSignal<T>>)> {
    let lambda = prob.lambda();
    let nan = T::nan();
    let r = match outcome {
        Ok(r) => r,
        Err(e) => {
            let row = SweepRow {
                lambda,
                c_lambda: nan,
                c_tilde: bvp.energy,
                tail_mass: nan,
                weighted_mass: nan,
                dist_alpha: nan,
                norm_lambda: nan,
                grad_norm: nan,
                iterations: 0,
                converged: false,
                start: None,
                flags: vec![format!("solve failed: {e}")],
            };
            return Ok((row, None));
        }
    };
    let grid = prob.grid();
    let kernel = prob.potential().kernel;
    let sampled = prob.sampled_potential();
    let (mut total, mut outside, mut weighted) = (T::zero(), T::zero(), T::zero());
    for ((t, a), &l) in grid.times().zip(r.u.pointwise_norms()).zip(sampled.envelope()) {
        let a2 = a * a;
        total = total + a2;
        weighted = weighted + l * a2;
        if !kernel.contains_open(t) {
            outside = outside + a2;
        }
    }
    let norm_lambda = lambda_norm(&r.u, sampled, lambda, prob.order())?;
    let dist_alpha = sobolev_norm(&r.u.sub(&bvp.u)?, prob.order());
    let mut flags = Vec::new();
    if !r.converged {
        flags.push(format!("not converged ({:?}, grad {:e})", r.stop, r.grad_norm.as_f64()));
    }
    if !(r.energy <= bvp.energy) {
        flags.push("c_lambda > c_tilde".into());
    }
    if !(bvp.energy < T::zero()) {
        flags.push("c_tilde >= 0".into());
    }
    if !(norm_lambda <= bound) {
        flags.push("norm exceeds uniform bound".into());
    }
    let row = SweepRow {
        lambda,
        c_lambda: r.energy,
        c_tilde: bvp.energy,
        tail_mass: if total > T::zero() { outside / total } else { T::zero() },
        weighted_mass: weighted * grid.dt(),
        dist_alpha,
        norm_lambda,
        grad_norm: r.grad_norm,
        iterations: r.iterations,
        converged: r.converged,
        start: Some(r.start),
        flags,
    };
    Ok((row, Some(r.u)))
}
