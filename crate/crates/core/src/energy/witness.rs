use serde::Serialize;

use super::functional::{directional_derivative, energy_parts, evaluate_energy};
use super::problem::Problem;
use crate::error::{Error, Result};
use crate::fracops::SampledSignal;
use crate::scalar::Real;
use crate::spaces::Interval;

/// Smallest scale tried before giving up.
pub const WITNESS_FLOOR: f64 = 1e-8;

const BISECTION_STEPS: usize = 200;

/// Smooth bump `exp(1 - 1/(1 - x^2))` on `interval`, normalized to sup norm 1 on the grid.
pub fn bump<T: Real>(prob: &Problem<T>, interval: Interval<T>) -> SampledSignal<T> {
    let mid = (interval.start + interval.end) / T::lit(2.0);
    let half = interval.length() / T::lit(2.0);
    let profile = |t: T| {
        let x = (t - mid) / half;
        if x.abs() < T::one() {
            (T::one() - (T::one() - x * x).recip()).exp()
        } else {
            T::zero()
        }
    };
    let raw = SampledSignal::from_fn(*prob.grid(), prob.dim(), |t, out| {
        let v = profile(t);
        out.iter_mut().for_each(|o| *o = v);
    })
    .expect("bump is finite");
    let sup = raw.sup_norm();
    if sup > T::zero() {
        raw.scaled(sup.recip())
    } else {
        raw
    }
}

/// A direction `u0` supported in `I` and a scale `s` with `I_lambda(s u0) < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub u0: SampledSignal<T>,
    pub scale: T,
    pub energy: T,
    /// `min(delta, (2 eta int |u0|^nu / ||u0||_lambda^2)^{1/(2-nu)})`: below it the
    /// growth bound `(W2)` alone forces negative energy.
    pub scale_bound: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessSummary<T> {
    pub scale: T,
    pub energy: T,
    pub scale_bound: T,
}

impl<T: Real> Witness<T> {
    pub fn point(&self) -> SampledSignal<T> {
        self.u0.scaled(self.scale)
    }

    pub fn summary(&self) -> WitnessSummary<T> {
        WitnessSummary { scale: self.scale, energy: self.energy, scale_bound: self.scale_bound }
    }
}

/// Negative-energy point along the ray through a bump supported in `I`.
///
/// Halves `s` from `delta / 2` until `I_lambda(s u0) < 0`, then bisects the ray
/// derivative `I'_lambda(s u0) u0` inside `(0, delta)` for the scale of least
/// energy on the ray.
pub fn negative_energy_witness<T: Real>(prob: &Problem<T>) -> Result<Witness<T>> {
    let nl = prob.nonlinearity();
    let u0 = bump(prob, prob.potential().vanishing);
    let energy_at = |s: T| evaluate_energy(&u0.scaled(s), prob);
    let slope_at = |s: T| directional_derivative(&u0.scaled(s), &u0, prob);
    let floor = T::lit(WITNESS_FLOOR);
    let two = T::lit(2.0);

    let mut s = nl.delta / two;
    loop {
        if s < floor {
            return Err(Error::WitnessNotFound { floor: WITNESS_FLOOR });
        }
        if energy_at(s)? < T::zero() {
            break;
        }
        s = s / two;
    }

    let mut lo = s;
    while !(slope_at(lo)? < T::zero()) && lo / two >= floor {
        lo = lo / two;
    }
    let mut hi = lo;
    let mut bracketed = false;
    if slope_at(lo)? < T::zero() {
        while hi < nl.delta {
            hi = (hi * two).min(nl.delta);
            if !(slope_at(hi)? < T::zero()) {
                bracketed = true;
                break;
            }
        }
    }
    let mut scale = s;
    if bracketed {
        for _ in 0..BISECTION_STEPS {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if slope_at(mid)? < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if energy_at(lo)? < energy_at(s)? {
            scale = lo;
        }
    }

    let parts = energy_parts(&u0, prob)?;
    let nu_mass: T = u0.pointwise_norms().map(|v| v.powf(nl.nu)).sum::<T>() * prob.grid().dt();
    let growth = (two * nl.eta * nu_mass / parts.norm_sq()).powf((two - nl.nu).recip());
    Ok(Witness { energy: energy_at(scale)?, scale, scale_bound: growth.min(nl.delta), u0 })
}
