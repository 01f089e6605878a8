use serde::Serialize;

use super::potential::PotentialMatrix;
use crate::error::{Error, Result};
use crate::fracops::{sobolev_norm, FracOrder, Grid};
use crate::random::SignalSampler;
use crate::scalar::Real;

/// Safety factor applied to the empirical Sobolev ratio.
pub const SOBOLEV_SAFETY: f64 = 1.1;

/// Reference grid for the random ensemble.
const ENSEMBLE_LEN: usize = 4096;
const ENSEMBLE_LENGTH: f64 = 32.0;

/// `||u||_inf <= C ||u||_alpha` constant, estimated as the larger of
/// `1.1 * max ||u||_inf / ||u||_alpha` over `trials` random band-limited
/// signals and the sharp continuous value from [`sobolev_constant_quadrature`].
pub fn estimate_sobolev_constant<T: Real>(order: FracOrder<T>, trials: usize, seed: u64) -> Result<T> {
    order.require_variational()?;
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let empirical = sobolev_ensemble_max(order, trials, seed);
    Ok((T::lit(SOBOLEV_SAFETY) * empirical).max(sobolev_constant_quadrature(order)))
}

/// Largest `||u||_inf / ||u||_alpha` over the seeded ensemble. The `i`-th signal
/// depends only on `(seed, i)`, so the maximum is monotone in `trials`.
pub fn sobolev_ensemble_max<T: Real>(order: FracOrder<T>, trials: usize, seed: u64) -> T {
    let grid = Grid::centered(ENSEMBLE_LEN, T::lit(ENSEMBLE_LENGTH)).expect("reference grid is valid");
    (0..trials as u64)
        .map(|i| {
            let mut rng = SignalSampler::new(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let max_mode = 1 + rng.index(128);
            let u = rng.band_limited(grid, 1, max_mode);
            let norm = sobolev_norm(&u, order);
            if norm > T::zero() {
                u.sup_norm() / norm
            } else {
                T::zero()
            }
        })
        .fold(T::zero(), T::max)
}

/// `((1/pi) int_0^inf dw / (1 + w^{2a}))^{1/2}`, the sharp constant for
/// `||u||_inf <= C ||u||_alpha` under the Plancherel normalization.
///
/// The tail is mapped to a finite interval by `w = y^{-m}`, `m = 1/(2a - 1)`,
/// which turns it into the bounded integrand `m / (y^{2am} + 1)` on `(0, 1]`.
pub fn sobolev_constant_quadrature<T: Real>(order: FracOrder<T>) -> T {
    let a = order.alpha().as_f64();
    let two_a = 2.0 * a;
    let m = 1.0 / (two_a - 1.0);
    let head = simpson(|w| 1.0 / (1.0 + w.powf(two_a)), 0.0, 1.0, 20_000);
    let tail = simpson(|y: f64| m / (y.powf(two_a * m) + 1.0), 0.0, 1.0, 20_000);
    T::lit(((head + tail) / std::f64::consts::PI).sqrt())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Sharp constant on a fixed periodic grid: `((1/L) sum_k 1 / (1 + |w_k|^{2a}))^{1/2}`.
/// Attained by the discrete Dirichlet kernel; always below the continuous value.
pub fn discrete_sobolev_constant<T: Real>(grid: &Grid<T>, order: FracOrder<T>) -> T {
    let two_a = order.alpha() + order.alpha();
    let s: T = (0..grid.len()).map(|k| (T::one() + grid.frequency(k).abs().powf(two_a)).recip()).sum();
    (s / grid.length()).sqrt()
}

/// `|{l < k}|` as `dt` times the number of grid points with `l < k`.
pub fn measure_sublevel<T: Real>(p: &PotentialMatrix<T>, grid: &Grid<T>) -> Result<T> {
    let last = grid.time(grid.len() - 1);
    if p.envelope_at(grid.t_min()) < p.k || p.envelope_at(last) < p.k {
        return Err(Error::SublevelTouchesBoundary);
    }
    let count = grid.times().filter(|&t| p.envelope_at(t) < p.k).count();
    Ok(grid.dt() * T::from_usize_lossy(count))
}

/// `C_alpha`, `|{l<k}|` and the derived `theta_0` and `Lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingConstants<T> {
    pub c_alpha: T,
    pub sublevel_measure: T,
    pub k: T,
    pub theta0: T,
    pub lambda_threshold: T,
}

impl<T: Real> EmbeddingConstants<T> {
    /// Fails unless `C_alpha^2 |{l<k}| < 1`.
    pub fn new(c_alpha: T, sublevel_measure: T, k: T) -> Result<Self> {
        let product = c_alpha * c_alpha * sublevel_measure;
        if !(product < T::one()) || !(product > T::zero()) || !(k > T::zero()) {
            return Err(Error::Inadmissible { product: product.as_f64() });
        }
        Ok(Self {
            c_alpha,
            sublevel_measure,
            k,
            theta0: (T::one() - product) / product,
            lambda_threshold: (k * product).recip(),
        })
    }

    /// Estimates `C_alpha` (never below the grid's sharp constant) and measures
    /// the sublevel set of `p` on `grid`.
    pub fn estimate(order: FracOrder<T>, p: &PotentialMatrix<T>, grid: &Grid<T>, trials: usize, seed: u64) -> Result<Self> {
        let c = estimate_sobolev_constant(order, trials, seed)?.max(discrete_sobolev_constant(grid, order));
        Self::new(c, measure_sublevel(p, grid)?, p.k)
    }

    /// `C_alpha^2 |{l<k}|`, admissible when below 1.
    pub fn admissibility_product(&self) -> T {
        self.c_alpha * self.c_alpha * self.sublevel_measure
    }

    /// Factor in `||u||_alpha^2 <= factor * ||u||_{X^alpha}^2`.
    pub fn x_equivalence_factor(&self) -> T {
        let product = self.admissibility_product();
        T::one() + product.max(self.k.recip()) / (T::one() - product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::SampledSignal;
    use crate::spaces::Interval;

    fn order(a: f64) -> FracOrder<f64> {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for a in [0.55, 0.75, 0.95] {
            let two_a = 2.0 * a;
            let exact = ((std::f64::consts::PI / two_a) / (std::f64::consts::PI / two_a).sin() / std::f64::consts::PI).sqrt();
            let got = sobolev_constant_quadrature(order(a));
            assert!((got - exact).abs() < 1e-6 * exact, "a={a}: {got} vs {exact}");
        }
    }

    #[test]
    fn estimate_rejects_bad_input() {
        assert_eq!(estimate_sobolev_constant(order(0.75), 0, 1), Err(Error::ZeroTrials));
        assert!(matches!(estimate_sobolev_constant(order(0.4), 10, 1), Err(Error::NotVariational(_))));
    }

    #[test]
    fn discrete_constant_attained_by_dirichlet_kernel() {
        let grid = Grid::centered(256, 16.0).unwrap();
        let a = order(0.75);
        let c = discrete_sobolev_constant(&grid, a);
        let two_a = 1.5;
        let u = SampledSignal::from_scalar_fn(grid, |t| {
            (0..256).map(|k| (grid.frequency(k) * t).cos() / (1.0 + grid.frequency(k).abs().powf(two_a))).sum::<f64>()
        })
        .unwrap();
        let ratio = u.sup_norm() / sobolev_norm(&u, a);
        assert!((ratio - c).abs() < 1e-10 * c, "{ratio} vs {c}");
        assert!(c < sobolev_constant_quadrature(a));
    }

    #[test]
    fn sublevel_of_quadratic_wall() {
        let p = PotentialMatrix::well(1, Interval::new(0.0, 0.5).unwrap(), Interval::new(-0.25, 0.75).unwrap(), 0.9, 0.0025)
            .unwrap();
        let grid = Grid::centered(4096, 32.0).unwrap();
        let exact = 1.0 + 2.0 * (0.9f64 * 0.0025).sqrt();
        let m = measure_sublevel(&p, &grid).unwrap();
        assert!((m - exact).abs() <= 2.0 * grid.dt());
        let coarse = Grid::centered(2048, 32.0).unwrap();
        assert!((measure_sublevel(&p, &coarse).unwrap() - m).abs() <= 2.0 * coarse.dt());
    }

    #[test]
    fn sublevel_empty_and_boundary() {
        let j = Interval::new(-0.25, 0.75).unwrap();
        let grid = Grid::centered(1024, 32.0).unwrap();
        let p = PotentialMatrix::custom("flat", 1, |_, m| m[0] = 1.0, |_| 1.0, 0.5, j, j).unwrap();
        assert_eq!(measure_sublevel(&p, &grid).unwrap(), 0.0);
        let p = PotentialMatrix::custom("low", 1, |_, m| m[0] = 0.1, |_| 0.1, 0.5, j, j).unwrap();
        assert_eq!(measure_sublevel(&p, &grid), Err(Error::SublevelTouchesBoundary));
    }

    #[test]
    fn constants_identities() {
        let c = EmbeddingConstants::new(0.9, 1.0949, 0.9).unwrap();
        let prod: f64 = 0.81 * 1.0949;
        assert!((c.theta0 - (1.0 - prod) / prod).abs() < 1e-15);
        assert!((c.lambda_threshold * 0.9 * prod - 1.0).abs() < 1e-15);
        assert!(matches!(EmbeddingConstants::new(1.0, 1.2, 0.9), Err(Error::Inadmissible { .. })));
    }
}
