use serde::Serialize;

use super::problem::Problem;
use crate::error::{Error, Result};
use crate::fracops::{riesz_composition, seminorm_sq, weighted_cross, SampledSignal};
use crate::scalar::Real;
use crate::spaces::check_potential_grid;

fn check<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<()> {
    check_potential_grid(u, prob.sampled_potential())
}

/// Terms of `I_lambda(u) = (|u|_a^2 + lambda int (Lu, u)) / 2 - int W(t, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParts<T> {
    pub seminorm_sq: T,
    pub potential_term: T,
    pub w_integral: T,
    pub lambda: T,
}

impl<T: Real> EnergyParts<T> {
    pub fn norm_sq(&self) -> T {
        self.seminorm_sq + self.lambda * self.potential_term
    }

    pub fn energy(&self) -> T {
        self.norm_sq() / T::lit(2.0) - self.w_integral
    }
}

/// `dt sum_i W(t_i, u_i)`, failing on the first non-finite value.
pub(crate) fn w_integral<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<T> {
    let nl = prob.nonlinearity();
    let grid = prob.grid();
    let mut acc = T::zero();
    for (i, &xi) in prob.xi_samples().iter().enumerate() {
        let t = grid.time(i);
        let w = nl.potential_with(t, xi, u.point(i));
        if !w.is_finite() {
            return Err(Error::NonFiniteEnergy { t: t.as_f64() });
        }
        acc = acc + w;
    }
    Ok(acc * grid.dt())
}

pub fn energy_parts<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<EnergyParts<T>> {
    check(u, prob)?;
    Ok(EnergyParts {
        seminorm_sq: seminorm_sq(u, prob.order()),
        potential_term: prob.sampled_potential().form(u, u),
        w_integral: w_integral(u, prob)?,
        lambda: prob.lambda(),
    })
}

/// `I_lambda(u)`.
pub fn evaluate_energy<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<T> {
    energy_parts(u, prob).map(|p| p.energy())
}

/// `B(u, v) = int [D^a u D^a v + lambda (L u, v)] dt`, the `X_lambda` inner product.
pub(crate) fn lambda_inner<T: Real>(u: &SampledSignal<T>, v: &SampledSignal<T>, prob: &Problem<T>) -> T {
    let grid = *u.grid();
    let two_a = prob.order().alpha() + prob.order().alpha();
    let riesz = weighted_cross(u, v, |k| if k == 0 { T::zero() } else { grid.frequency(k).abs().powf(two_a) });
    riesz + prob.lambda() * prob.sampled_potential().form(u, v)
}

/// `int (grad W(t, u), phi) dt`.
fn w_pairing<T: Real>(u: &SampledSignal<T>, phi: &SampledSignal<T>, prob: &Problem<T>) -> Result<T> {
    let nl = prob.nonlinearity();
    let grid = prob.grid();
    let mut buf = vec![T::zero(); u.dim()];
    let mut acc = T::zero();
    for (i, &xi) in prob.xi_samples().iter().enumerate() {
        let t = grid.time(i);
        nl.gradient_with(t, xi, u.point(i), &mut buf);
        let term: T = buf.iter().zip(phi.point(i)).map(|(&g, &f)| g * f).sum();
        if !term.is_finite() {
            return Err(Error::NonFiniteEnergy { t: t.as_f64() });
        }
        acc = acc + term;
    }
    Ok(acc * grid.dt())
}

/// `I'_lambda(u) phi = int [D^a u D^a phi + lambda (L u, phi) - (grad W(t, u), phi)] dt`.
pub fn directional_derivative<T: Real>(u: &SampledSignal<T>, phi: &SampledSignal<T>, prob: &Problem<T>) -> Result<T> {
    check(u, prob)?;
    u.check_compatible(phi)?;
    Ok(lambda_inner(u, phi, prob) - w_pairing(u, phi, prob)?)
}

/// `L^2` Riesz representative of `I'_lambda(u)`: `|w|^{2a} u + lambda L u - grad W(t, u)`.
pub fn gradient<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<SampledSignal<T>> {
    check(u, prob)?;
    let mut g = riesz_composition(u, prob.order())?;
    let lu = prob.sampled_potential().apply(u);
    let nl = prob.nonlinearity();
    let grid = prob.grid();
    let lambda = prob.lambda();
    let d = u.dim();
    let mut buf = vec![T::zero(); d];
    for (i, &xi) in prob.xi_samples().iter().enumerate() {
        let t = grid.time(i);
        nl.gradient_with(t, xi, u.point(i), &mut buf);
        for c in 0..d {
            let v = &mut g.values_mut()[i * d + c];
            *v = *v + lambda * lu.get(i, c) - buf[c];
            if !v.is_finite() {
                return Err(Error::NonFiniteEnergy { t: t.as_f64() });
            }
        }
    }
    Ok(g)
}

/// `I_lambda(u + s d) - I_lambda(u)`, accurate when the difference is tiny
/// compared with either energy. `b_ud = B(u, d)` and `b_dd = B(d, d)`.
pub(crate) fn energy_change<T: Real>(
    u: &SampledSignal<T>,
    trial: &SampledSignal<T>,
    s: T,
    b_ud: T,
    b_dd: T,
    prob: &Problem<T>,
) -> Result<T> {
    let nl = prob.nonlinearity();
    let grid = prob.grid();
    let mut dw = T::zero();
    for (i, &xi) in prob.xi_samples().iter().enumerate() {
        let t = grid.time(i);
        let inc = nl.increment_with(t, xi, u.point(i), trial.point(i));
        if !inc.is_finite() {
            return Err(Error::NonFiniteEnergy { t: t.as_f64() });
        }
        dw = dw + inc;
    }
    Ok(s * b_ud + s * s * b_dd / T::lit(2.0) - dw * grid.dt())
}

/// `(1 / 2) r^2 - K r^p` with `K = ||xi||_{2/(2-p)} / (p theta_0^{p/2})`, the
/// coercivity bound on `I_lambda` as a function of `r = ||u||_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityBound<T> {
    pub coefficient: T,
    pub p: T,
}

impl<T: Real> CoercivityBound<T> {
    pub fn value(&self, r: T) -> T {
        r * r / T::lit(2.0) - self.coefficient * r.powf(self.p)
    }

    /// Minimizer `r* = (p K)^{1/(2-p)}`.
    pub fn minimizer(&self) -> T {
        (self.p * self.coefficient).powf((T::lit(2.0) - self.p).recip())
    }

    /// Global minimum `(1/2 - 1/p) r*^2`.
    pub fn minimum(&self) -> T {
        let r = self.minimizer();
        (T::lit(0.5) - self.p.recip()) * r * r
    }

    /// Positive root `(2 K)^{1/(2-p)}`; every `u` with `I_lambda(u) <= 0` has `||u||_lambda` below it.
    pub fn root(&self) -> T {
        (T::lit(2.0) * self.coefficient).powf((T::lit(2.0) - self.p).recip())
    }
}

/// Grid value of `||xi||_{L^q}`, `q = 2/(2-p)`, and the mass the grid misses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiNorm<T> {
    pub exponent: T,
    pub value: T,
    /// `(||xi||_{L^q(R)}^q - ||xi||_{L^q(grid)}^q)^{1/q}` from an extended quadrature.
    pub tail: T,
}

/// Periods of extension on each side for the tail estimate.
const TAIL_PERIODS: usize = 8;

pub fn xi_norm<T: Real>(prob: &Problem<T>) -> XiNorm<T> {
    let nl = prob.nonlinearity();
    let q = T::lit(2.0) / (T::lit(2.0) - nl.p);
    let grid = prob.grid();
    let dt = grid.dt();
    let on_grid: T = prob.xi_samples().iter().map(|x| x.abs().powf(q)).sum::<T>() * dt;
    let n = grid.len();
    let mut tail = T::zero();
    for j in 1..=(TAIL_PERIODS * n) {
        let step = dt * T::from_usize_lossy(j);
        let right = grid.time(n - 1) + step;
        let left = grid.t_min() - step;
        tail = tail + nl.xi(right).abs().powf(q) + nl.xi(left).abs().powf(q);
    }
    XiNorm { exponent: q, value: on_grid.powf(q.recip()), tail: (tail * dt).powf(q.recip()) }
}

/// Coercivity bound built from `theta_0` and the grid `||xi||`.
pub fn coercivity_bound<T: Real>(prob: &Problem<T>) -> CoercivityBound<T> {
    let nl = prob.nonlinearity();
    let theta0 = prob.constants().theta0;
    let coefficient = xi_norm(prob).value / (nl.p * theta0.powf(nl.p / T::lit(2.0)));
    CoercivityBound { coefficient, p: nl.p }
}

/// `(1/2) ||u||_lambda^2 - ||xi|| ||u||_lambda^p / (p theta_0^{p/2})`, a lower bound
/// for `I_lambda(u)` once `lambda >= Lambda`.
pub fn lower_bound<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>) -> Result<T> {
    prob.require_threshold()?;
    check(u, prob)?;
    let p = energy_parts(u, prob)?;
    Ok(coercivity_bound(prob).value(p.norm_sq().sqrt()))
}

/// `I_lambda(u)` with its gradient norm and certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub energy: T,
    pub grad_norm: T,
    pub lower_bound: T,
    pub witness_scale: Option<T>,
}

pub fn energy_report<T: Real>(u: &SampledSignal<T>, prob: &Problem<T>, witness_scale: Option<T>) -> Result<EnergyReport<T>> {
    Ok(EnergyReport {
        energy: evaluate_energy(u, prob)?,
        grad_norm: gradient(u, prob)?.norm_l2(),
        lower_bound: lower_bound(u, prob)?,
        witness_scale,
    })
}
