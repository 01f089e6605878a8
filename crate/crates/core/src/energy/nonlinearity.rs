use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spaces::Interval;

type PotentialFn<T> = Arc<dyn Fn(T, &[T]) -> T + Send + Sync>;
type GradientFn<T> = Arc<dyn Fn(T, &[T], &mut [T]) + Send + Sync>;
type ProfileFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Law<T> {
    /// `W = xi ((|u|^2 + eps^2)^{p/2} - eps^p) / p`.
    Power { eps: T },
    Zero,
    Custom { w: PotentialFn<T>, grad: GradientFn<T> },
}

/// `W(t, u)` with `grad W` and the growth data of `(W1)` and `(W2)`:
///
/// * `|grad W(t, u)| <= xi(t) |u|^{p-1}`;
/// * `|W(t, u)| >= eta |u|^nu` for `t` in `I` and `|u| <= delta`.
#[derive(Clone)]
pub struct Nonlinearity<T> {
    name: String,
    law: Law<T>,
    xi: ProfileFn<T>,
    pub p: T,
    pub nu: T,
    pub eta: T,
    pub delta: T,
}

impl<T: fmt::Debug> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("nu", &self.nu)
            .field("eta", &self.eta)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

fn check_exponent<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::one() && v < T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::Parameter { name, reason: format!("must lie in (1, 2), got {v}") })
    }
}

fn check_positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name, reason: format!("must be positive and finite, got {v}") })
    }
}

/// Gaussian weight `scale * exp(-t^2 / 10)`.
pub fn gaussian_weight<T: Real>(scale: T) -> impl Fn(T) -> T + Clone + Send + Sync + 'static {
    move |t: T| scale * (-(t * t) / T::lit(10.0)).exp()
}

impl<T: Real> Nonlinearity<T> {
    /// `W(t, u) = xi(t) ((|u|^2 + eps^2)^{p/2} - eps^p) / p`, `xi(t) = xi_scale e^{-t^2/10}`,
    /// `nu = p`, and `eta = min_{closure of I} xi / p`.
    ///
    /// With `eps > 0` the gradient is Lipschitz at the origin but `W` becomes
    /// quadratic there, so `(W2)` only holds away from `u = 0`.
    pub fn power(p: T, eps: T, xi_scale: T, delta: T, vanishing: Interval<T>) -> Result<Self> {
        check_exponent("p", p)?;
        check_positive("xi_scale", xi_scale)?;
        check_positive("delta", delta)?;
        if !(eps >= T::zero()) || !eps.is_finite() {
            return Err(Error::Parameter { name: "eps", reason: format!("must be nonnegative, got {eps}") });
        }
        let xi = gaussian_weight(xi_scale);
        let far = vanishing.start.abs().max(vanishing.end.abs());
        let eta = xi(far) / p;
        let name = if eps > T::zero() { "power-regularized" } else { "power" };
        Ok(Self { name: name.into(), law: Law::Power { eps }, xi: Arc::new(xi), p, nu: p, eta, delta })
    }

    /// `W = 0`. Satisfies `(W1)` with `xi = 0` and violates `(W2)`.
    pub fn zero(p: T) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(Self {
            name: "zero".into(),
            law: Law::Zero,
            xi: Arc::new(|_| T::zero()),
            p,
            nu: p,
            eta: T::zero(),
            delta: T::one(),
        })
    }

    /// Arbitrary `W` with declared growth data. Only the sampled checks of
    /// [`super::verify_growth`] vouch for the declarations.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        w: impl Fn(T, &[T]) -> T + Send + Sync + 'static,
        grad: impl Fn(T, &[T], &mut [T]) + Send + Sync + 'static,
        xi: impl Fn(T) -> T + Send + Sync + 'static,
        p: T,
        nu: T,
        eta: T,
        delta: T,
    ) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("nu", nu)?;
        check_positive("delta", delta)?;
        Ok(Self {
            name: name.into(),
            law: Law::Custom { w: Arc::new(w), grad: Arc::new(grad) },
            xi: Arc::new(xi),
            p,
            nu,
            eta,
            delta,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.law, Law::Zero)
    }

    pub fn xi(&self, t: T) -> T {
        (self.xi)(t)
    }

    pub fn potential(&self, t: T, u: &[T]) -> T {
        self.potential_with(t, (self.xi)(t), u)
    }

    pub fn gradient(&self, t: T, u: &[T], out: &mut [T]) {
        self.gradient_with(t, (self.xi)(t), u, out)
    }

    /// `W(t, u)` given a precomputed `xi(t)`.
    pub(crate) fn potential_with(&self, t: T, xi: T, u: &[T]) -> T {
        match &self.law {
            Law::Power { eps } => {
                let x = norm_sq(u);
                if *eps == T::zero() {
                    xi * x.powf(self.p / T::lit(2.0)) / self.p
                } else {
                    let e2 = *eps * *eps;
                    xi * power_increment(e2, x, self.p) / self.p
                }
            }
            Law::Zero => T::zero(),
            Law::Custom { w, .. } => w(t, u),
        }
    }

    pub(crate) fn gradient_with(&self, t: T, xi: T, u: &[T], out: &mut [T]) {
        match &self.law {
            Law::Power { eps } => {
                let a = norm_sq(u) + *eps * *eps;
                let f = if a > T::zero() { xi * a.powf((self.p - T::lit(2.0)) / T::lit(2.0)) } else { T::zero() };
                out.iter_mut().zip(u).for_each(|(o, &v)| *o = f * v);
            }
            Law::Zero => out.iter_mut().for_each(|o| *o = T::zero()),
            Law::Custom { grad, .. } => grad(t, u, out),
        }
    }

    /// `W(t, new) - W(t, old)` without cancellation for the power law.
    pub(crate) fn increment_with(&self, t: T, xi: T, old: &[T], new: &[T]) -> T {
        match &self.law {
            Law::Power { eps } => {
                let x = norm_sq(old) + *eps * *eps;
                let d: T = old.iter().zip(new).map(|(&a, &b)| (b - a) * (b + a)).sum();
                xi * power_increment(x, d, self.p) / self.p
            }
            Law::Zero => T::zero(),
            Law::Custom { w, .. } => w(t, new) - w(t, old),
        }
    }
}

fn norm_sq<T: Real>(u: &[T]) -> T {
    u.iter().map(|&v| v * v).sum()
}

/// `(x + d)^{p/2} - x^{p/2}` for `x >= 0`, `x + d >= 0`.
fn power_increment<T: Real>(x: T, d: T, p: T) -> T {
    let half = p / T::lit(2.0);
    if x == T::zero() {
        return d.max(T::zero()).powf(half);
    }
    x.powf(half) * (half * (d / x).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> Interval<f64> {
        Interval::new(0.0, 0.5).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(Nonlinearity::power(2.0, 0.0, 1.0, 1.0, interval()).is_err());
        assert!(Nonlinearity::power(1.5, -1.0, 1.0, 1.0, interval()).is_err());
        assert!(Nonlinearity::power(1.5, 0.0, 0.0, 1.0, interval()).is_err());
        assert!(Nonlinearity::<f64>::zero(1.0).is_err());
    }

    #[test]
    fn power_law_values() {
        let nl = Nonlinearity::power(1.5, 0.0, 1.0, 1.0, interval()).unwrap();
        let t = 1.0;
        let xi = (-0.1f64).exp();
        let u = [0.3, -0.4];
        assert!((nl.potential(t, &u) - xi * 0.5f64.powf(1.5) / 1.5).abs() < 1e-15);
        let mut g = [0.0; 2];
        nl.gradient(t, &u, &mut g);
        assert!((g[0] - xi * 0.5f64.powf(-0.5) * 0.3).abs() < 1e-15);
        nl.gradient(t, &[0.0, 0.0], &mut g);
        assert_eq!(g, [0.0, 0.0]);
        assert_eq!(nl.potential(t, &[0.0, 0.0]), 0.0);
        assert!((nl.eta - (-0.025f64).exp() / 1.5).abs() < 1e-15);
    }

    #[test]
    fn increment_is_accurate() {
        for eps in [0.0, 1e-3] {
            let nl = Nonlinearity::power(1.5, eps, 1.0, 1.0, interval()).unwrap();
            let old = [0.7];
            let new = [0.7 + 1e-9];
            let direct = nl.potential(0.0, &new) - nl.potential(0.0, &old);
            let exact_slope = {
                let mut g = [0.0];
                nl.gradient(0.0, &old, &mut g);
                g[0]
            };
            let inc = nl.increment_with(0.0, 1.0, &old, &new);
            let step = new[0] - old[0];
            assert!((inc - step * exact_slope).abs() < 1e-17);
            assert!((inc - direct).abs() < 1e-15);
            assert_eq!(nl.increment_with(0.0, 1.0, &[0.0], &[0.5]), nl.potential(0.0, &[0.5]));
        }
    }

    #[test]
    fn regularized_vanishes_at_origin() {
        let nl = Nonlinearity::power(1.5, 0.1, 1.0, 1.0, interval()).unwrap();
        assert_eq!(nl.potential(0.0, &[0.0]), 0.0);
        assert_eq!(nl.name(), "power-regularized");
    }
}
