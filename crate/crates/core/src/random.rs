//! Seeded random test signals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fracops::{Grid, SampledSignal};
use crate::scalar::Real;

/// Deterministic generator of smooth random signals.
#[derive(Debug, Clone)]
pub struct SignalSampler {
    rng: ChaCha8Rng,
}

impl SignalSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, hi: usize) -> usize {
        self.rng.random_range(0..hi)
    }

    /// Random trigonometric polynomial of degree `<= max_mode` over the grid period,
    /// with a random spectral decay rate. Contains no Nyquist content.
    pub fn band_limited<T: Real>(&mut self, grid: Grid<T>, dim: usize, max_mode: usize) -> SampledSignal<T> {
        let max_mode = max_mode.clamp(1, grid.len() / 2 - 1);
        let decay = self.uniform(0.0, 2.0);
        let degree = 1 + self.index(max_mode);
        let with_mean = self.uniform(0.0, 1.0) < 0.5;
        let mut coeffs = Vec::with_capacity((degree + 1) * dim);
        for m in 0..=degree {
            let sd = (1.0 + m as f64).powf(-decay);
            for _ in 0..dim {
                let a = if m == 0 && !with_mean { 0.0 } else { sd * self.normal() };
                let b = if m == 0 { 0.0 } else { sd * self.normal() };
                coeffs.push((a, b));
            }
        }
        let t0 = grid.t_min().as_f64();
        let base = 2.0 * std::f64::consts::PI / grid.length().as_f64();
        SampledSignal::from_fn(grid, dim, |t, out| {
            let (s1, c1) = (base * (t.as_f64() - t0)).sin_cos();
            let (mut s, mut c) = (0.0f64, 1.0f64);
            let mut acc = vec![0.0f64; dim];
            for m in 0..=degree {
                for (k, a) in acc.iter_mut().enumerate() {
                    let (ca, cb) = coeffs[m * dim + k];
                    *a += ca * c + cb * s;
                }
                (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            }
            out.iter_mut().zip(&acc).for_each(|(v, &a)| *v = T::lit(a));
        })
        .expect("finite trigonometric sum")
    }

    /// Band-limited zero-mean signal.
    pub fn zero_mean<T: Real>(&mut self, grid: Grid<T>, dim: usize, max_mode: usize) -> SampledSignal<T> {
        let u = self.band_limited(grid, dim, max_mode);
        let means = u.means();
        let mut v = u;
        let d = v.dim();
        for (i, x) in v.values_mut().iter_mut().enumerate() {
            *x = *x - means[i % d];
        }
        v
    }

    /// Smooth random wave packet: a random polynomial in `(t - center) / width`
    /// with random oscillation, under a Gaussian envelope of the given width.
    pub fn localized<T: Real>(&mut self, grid: Grid<T>, dim: usize, center: f64, width: f64) -> SampledSignal<T> {
        let freq = self.uniform(0.0, 6.0 / width);
        let coeffs: Vec<[f64; 4]> = (0..dim).map(|_| [self.normal(), self.normal(), self.normal(), self.normal()]).collect();
        let phase = self.uniform(0.0, std::f64::consts::TAU);
        SampledSignal::from_fn(grid, dim, |t, out| {
            let x = (t.as_f64() - center) / width;
            let env = (-x * x).exp();
            let wave = (freq * width * x + phase).cos();
            for (v, c) in out.iter_mut().zip(&coeffs) {
                *v = T::lit(env * (c[0] + c[1] * x + c[2] * x * x + c[3] * wave));
            }
        })
        .expect("finite packet")
    }
}
