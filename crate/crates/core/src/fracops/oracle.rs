//! Time-domain quadrature of the left Liouville-Weyl derivative, used to
//! validate the spectral operators.

use super::operators::FracOrder;
use super::signal::SampledSignal;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periods of history folded into the convolution weights.
const HISTORY_PERIODS: usize = 64;

/// Grünwald-Letnikov weights `g_m = (-1)^m binom(alpha, m)` by the recursion
/// `g_m = g_{m-1} (1 - (alpha + 1) / m)`, folded modulo `n` over the history.
fn folded_weights<T: Real>(alpha: T, n: usize) -> Vec<T> {
    let mut folded = vec![T::zero(); n];
    let mut g = T::one();
    folded[0] = g;
    for m in 1..n * HISTORY_PERIODS {
        g = g * (T::one() - (alpha + T::one()) / T::from_usize_lossy(m));
        folded[m % n] = folded[m % n] + g;
    }
    folded
}

/// Weighted-shifted Grünwald-Letnikov approximation of `_{-inf}D^alpha_t u`.
///
/// Combines the shift-1 and shift-0 Grünwald sums with weights `alpha/2` and
/// `1 - alpha/2`, which cancels the first-order error term: the scheme is
/// second order in `dt`. The grid is one period of the signal, so the
/// half-line sum runs over earlier periods as well; the mean is removed first
/// because the derivative annihilates constants and the periodic history sum
/// converges only for zero-mean data.
///
/// Requires `u` to decay below `1e-12 * max|u|` at both ends of the window.
pub fn quadrature_left_derivative<T: Real>(u: &SampledSignal<T>, order: FracOrder<T>) -> Result<SampledSignal<T>> {
    let peak = u.sup_norm();
    let n = u.len();
    let ends = [u.point(0), u.point(n - 1)]
        .iter()
        .map(|p| p.iter().map(|&v| v * v).sum::<T>().sqrt())
        .fold(T::zero(), T::max);
    if peak > T::zero() && ends > T::lit(1e-12) * peak {
        return Err(Error::NotDecaying { edge: (ends / peak).as_f64() });
    }

    let alpha = order.alpha();
    let weights = folded_weights(alpha, n);
    let lead = alpha / T::lit(2.0);
    let lag = T::one() - lead;
    let scale = u.grid().dt().powf(-alpha);
    let means = u.means();

    let mut components = Vec::with_capacity(u.dim());
    for (c, &mean) in means.iter().enumerate() {
        let v: Vec<T> = u.component(c).into_iter().map(|x| x - mean).collect();
        // ext[i] = v[i mod n] for i <= 2n, so both sums read contiguous windows
        let ext: Vec<T> = v.iter().chain(v.iter()).chain(v.iter().take(1)).copied().collect();
        let out: Vec<T> = (0..n)
            .map(|j| {
                let plain = dot_reversed(&weights, &ext[j + 1..=j + n]);
                let shifted = dot_reversed(&weights, &ext[j + 2..=j + n + 1]);
                scale * (lead * shifted + lag * plain)
            })
            .collect();
        components.push(out);
    }
    SampledSignal::from_components(*u.grid(), &components)
}

/// `sum_r w[r] * window[len - 1 - r]`.
fn dot_reversed<T: Real>(w: &[T], window: &[T]) -> T {
    w.iter().zip(window.iter().rev()).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::Grid;

    #[test]
    fn weights_sum_to_zero_over_long_history() {
        let w = folded_weights(0.6f64, 64);
        let total: f64 = w.iter().sum();
        // sum_{m<M} g_m = binom(M - 1 - alpha, M - 1) ~ M^{-alpha} / Gamma(1 - alpha)
        assert!(total.abs() < 0.01, "{total}");
    }

    #[test]
    fn rejects_non_decaying_signal() {
        let g = Grid::<f64>::centered(64, 8.0).unwrap();
        let u = SampledSignal::from_scalar_fn(g, |t| (t * 0.5).cos()).unwrap();
        let a = FracOrder::new(0.5).unwrap();
        assert!(matches!(quadrature_left_derivative(&u, a), Err(Error::NotDecaying { .. })));
    }

    #[test]
    fn zero_and_linearity() {
        let g = Grid::<f64>::centered(128, 16.0).unwrap();
        let a = FracOrder::new(0.5).unwrap();
        let z = SampledSignal::zeros(g, 1);
        assert_eq!(quadrature_left_derivative(&z, a).unwrap().sup_norm(), 0.0);
        let u = SampledSignal::from_scalar_fn(g, |t| (-t * t).exp() * (1.0 + t)).unwrap();
        let base = quadrature_left_derivative(&u, a).unwrap();
        for c in [2.0, -0.5, 8.0] {
            let scaled = quadrature_left_derivative(&u.scaled(c), a).unwrap();
            assert_eq!(scaled, base.scaled(c));
        }
    }
}
