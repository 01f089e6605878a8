use num_complex::Complex;

use super::signal::SampledSignal;
use super::spectrum::{apply_symbol, weighted_power};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fractional order `alpha` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FracOrder<T> {
    alpha: T,
}

impl<T: Real> FracOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha < T::one() {
            Ok(Self { alpha })
        } else {
            Err(Error::Order(alpha.as_f64()))
        }
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// True iff `alpha > 1/2`, where `H^alpha` embeds into continuous functions.
    #[inline]
    pub fn variational_ok(&self) -> bool {
        self.alpha > T::lit(0.5)
    }

    pub(crate) fn require_variational(&self) -> Result<()> {
        if self.variational_ok() {
            Ok(())
        } else {
            Err(Error::NotVariational(self.alpha.as_f64()))
        }
    }
}

/// Which half-line the operator integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Symbol `(+-iw)^power` on bin `k` with the principal branch.
///
/// The zero mode maps to 0. The Nyquist bin is its own conjugate partner, so it
/// cannot carry the phase; it gets the real magnitude `|w|^power`, which keeps
/// the composition, inverse and Parseval identities exact on every signal.
fn power_symbol<T: Real>(u: &SampledSignal<T>, side: Side, power: T) -> impl Fn(usize) -> Complex<T> + '_ {
    let grid = *u.grid();
    move |k| {
        let w = grid.frequency(k);
        if k == 0 {
            return Complex::new(T::zero(), T::zero());
        }
        let mag = w.abs().powf(power);
        if grid.is_nyquist(k) {
            return Complex::new(mag, T::zero());
        }
        let sign = match side {
            Side::Left => w.signum(),
            Side::Right => -w.signum(),
        };
        Complex::from_polar(mag, power * T::FRAC_PI_2() * sign)
    }
}

/// Left Liouville-Weyl derivative `_{-inf}D^alpha_t u`, symbol `(iw)^alpha`.
pub fn left_derivative<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    apply_symbol(u, power_symbol(u, Side::Left, order.alpha()))
}

/// Right Liouville-Weyl derivative `_tD^alpha_inf u`, symbol `(-iw)^alpha`.
pub fn right_derivative<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    apply_symbol(u, power_symbol(u, Side::Right, order.alpha()))
}

fn require_zero_mean<T: Real>(u: &SampledSignal<T>) -> Result<()> {
    let n = T::from_usize_lossy(u.len() * u.dim());
    let rms = (u.values().iter().map(|&v| v * v).sum::<T>() / n).sqrt();
    for mean in u.means() {
        if mean.abs() > T::lit(1e-10) * rms {
            return Err(Error::NonZeroMean { mean: mean.as_f64(), rms: rms.as_f64() });
        }
    }
    Ok(())
}

/// Left Liouville-Weyl integral `_{-inf}I^alpha_t u`, symbol `(iw)^{-alpha}`.
///
/// The symbol is singular at `w = 0`, so the input must have zero mean; the
/// zero mode of the output is 0.
pub fn left_integral<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    require_zero_mean(u)?;
    apply_symbol(u, power_symbol(u, Side::Left, -order.alpha()))
}

/// Right Liouville-Weyl integral `_tI^alpha_inf u`, symbol `(-iw)^{-alpha}`.
pub fn right_integral<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    require_zero_mean(u)?;
    apply_symbol(u, power_symbol(u, Side::Right, -order.alpha()))
}

/// `_tD^alpha_inf (_{-inf}D^alpha_t u)` as the single real multiplier `|w|^{2 alpha}`.
pub fn riesz_composition<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    let grid = *u.grid();
    let two_alpha = order.alpha() + order.alpha();
    apply_symbol(u, move |k| Complex::new(grid.frequency(k).abs().powf(two_alpha), T::zero()))
}

/// Multiplier `(|w|^{2 alpha} + shift)^{-1}`, the inverse of the shifted Riesz composition.
pub(crate) fn shifted_riesz_inverse<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>, shift: T) -> Result<SampledSignal<T>> {
    let grid = *u.grid();
    let two_alpha = order.alpha() + order.alpha();
    apply_symbol(u, move |k| Complex::new((grid.frequency(k).abs().powf(two_alpha) + shift).recip(), T::zero()))
}

/// `|u|_alpha = || |w|^alpha u^ ||`, normalized by Plancherel so that it equals
/// `|| _{-inf}D^alpha_t u ||_{L^2}` in the time domain.
pub fn seminorm_alpha<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> T {
    seminorm_sq(u, order).sqrt()
}

pub(crate) fn seminorm_sq<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> T {
    let grid = *u.grid();
    let two_alpha = order.alpha() + order.alpha();
    weighted_power(u, |k| if k == 0 { T::zero() } else { grid.frequency(k).abs().powf(two_alpha) })
}

/// Full `H^alpha` norm `(||u||_{L^2}^2 + |u|_alpha^2)^{1/2}`.
pub fn sobolev_norm<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> T {
    let l2 = u.norm_l2();
    (l2 * l2 + seminorm_sq(u, order)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::Grid;

    fn order(a: f64) -> FracOrder<f64> {
        FracOrder::new(a).unwrap()
    }

    fn tone(w_bin: usize) -> (SampledSignal<f64>, f64) {
        let g = Grid::<f64>::centered(256, 16.0).unwrap();
        let w1 = g.frequency(w_bin);
        (SampledSignal::from_scalar_fn(g, |t| (w1 * t).cos()).unwrap(), w1)
    }

    fn max_rel(a: &SampledSignal<f64>, b: &SampledSignal<f64>) -> f64 {
        a.sub(b).unwrap().sup_norm() / b.sup_norm()
    }

    #[test]
    fn order_range() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(!order(0.5).variational_ok());
        assert!(order(0.51).variational_ok());
    }

    #[test]
    fn zero_in_zero_out() {
        let g = Grid::<f64>::centered(64, 8.0).unwrap();
        let z = SampledSignal::zeros(g, 2);
        let a = order(0.7);
        for out in [
            left_derivative(&z, a).unwrap(),
            right_derivative(&z, a).unwrap(),
            left_integral(&z, a).unwrap(),
            riesz_composition(&z, a).unwrap(),
        ] {
            assert_eq!(out.sup_norm(), 0.0);
        }
        assert_eq!(seminorm_alpha(&z, a), 0.0);
    }

    #[test]
    fn derivative_of_cosine_shifts_phase() {
        let (u, w1) = tone(5);
        let a = order(0.6);
        let al = a.alpha();
        let ph = al * std::f64::consts::FRAC_PI_2;
        let left = left_derivative(&u, a).unwrap();
        let right = right_derivative(&u, a).unwrap();
        let el = SampledSignal::from_scalar_fn(*u.grid(), |t| w1.powf(al) * (w1 * t + ph).cos()).unwrap();
        let er = SampledSignal::from_scalar_fn(*u.grid(), |t| w1.powf(al) * (w1 * t - ph).cos()).unwrap();
        assert!(max_rel(&left, &el) < 1e-8);
        assert!(max_rel(&right, &er) < 1e-8);
    }

    #[test]
    fn integral_of_sine() {
        let g = Grid::<f64>::centered(256, 16.0).unwrap();
        let w1 = g.frequency(4);
        let u = SampledSignal::from_scalar_fn(g, |t| (w1 * t).sin()).unwrap();
        let a = order(0.35);
        let got = left_integral(&u, a).unwrap();
        let ph = a.alpha() * std::f64::consts::FRAC_PI_2;
        let want = SampledSignal::from_scalar_fn(g, |t| w1.powf(-a.alpha()) * (w1 * t - ph).sin()).unwrap();
        assert!(max_rel(&got, &want) < 1e-8);
        let back = left_derivative(&got, a).unwrap();
        assert!(max_rel(&back, &u) < 1e-8);
    }

    #[test]
    fn integral_rejects_nonzero_mean() {
        let g = Grid::<f64>::centered(64, 8.0).unwrap();
        let u = SampledSignal::from_scalar_fn(g, |t| 1.0 + t.sin()).unwrap();
        assert!(matches!(left_integral(&u, order(0.5)), Err(Error::NonZeroMean { .. })));
        assert!(matches!(right_integral(&u, order(0.5)), Err(Error::NonZeroMean { .. })));
    }

    #[test]
    fn riesz_on_eigenfunction() {
        let (u, w1) = tone(7);
        let a = order(0.75);
        let got = riesz_composition(&u, a).unwrap();
        assert!(max_rel(&got, &u.scaled(w1.powf(1.5))) < 1e-12);
    }

    #[test]
    fn seminorm_of_tone() {
        let (u, w1) = tone(3);
        let a = order(0.8);
        let mass = u.norm_l2();
        assert!((seminorm_alpha(&u, a) - w1.powf(0.8) * mass).abs() < 1e-12 * mass);
    }

    #[test]
    fn nyquist_content_keeps_identities() {
        let g = Grid::<f64>::centered(16, 4.0).unwrap();
        let u = SampledSignal::from_scalar_fn(g, |t| (std::f64::consts::PI * t / g.dt()).cos() + 0.1 * t.sin()).unwrap();
        let a = order(0.7);
        let two = right_derivative(&left_derivative(&u, a).unwrap(), a).unwrap();
        let one = riesz_composition(&u, a).unwrap();
        assert!(max_rel(&two, &one) < 1e-12);
        let d = left_derivative(&u, a).unwrap();
        assert!((d.norm_l2() - seminorm_alpha(&u, a)).abs() < 1e-12 * d.norm_l2());
    }
}
