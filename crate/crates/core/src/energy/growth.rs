use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::nonlinearity::Nonlinearity;
use crate::fracops::Grid;
use crate::scalar::Real;
use crate::spaces::Interval;

/// Sample points `(t, u)` for [`verify_growth`]: every grid time, radii up to
/// `max_radius`, and `directions` random unit directions in `R^dim`.
#[derive(Debug, Clone)]
pub struct GrowthMesh<T> {
    pub grid: Grid<T>,
    pub dim: usize,
    pub vanishing: Interval<T>,
    pub radii: Vec<T>,
    pub directions: usize,
    pub seed: u64,
}

impl<T: Real> GrowthMesh<T> {
    /// 24 geometric radii in `[1e-4, 2]` and `dim` random directions.
    pub fn standard(grid: Grid<T>, dim: usize, vanishing: Interval<T>) -> Self {
        let radii = (0..24).map(|i| T::lit(1e-4 * (2e4f64).powf(i as f64 / 23.0))).collect();
        Self { grid, dim, vanishing, radii, directions: dim.max(1), seed: 0x9a0f }
    }

    fn unit_directions(&self) -> Vec<Vec<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut dirs = vec![vec![T::one(); self.dim]];
        while dirs.len() < self.directions + 1 {
            let v: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-6 {
                dirs.push(v.iter().map(|x| T::lit(x / n)).collect());
            }
        }
        let root = T::from_usize_lossy(self.dim).sqrt().recip();
        dirs[0].iter_mut().for_each(|x| *x = root);
        dirs
    }
}

/// Outcome of one sampled hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub pass: bool,
    /// Most negative (or smallest) slack, in the units of the inequality.
    pub worst_margin: f64,
    pub t: f64,
    pub u_norm: f64,
    pub samples: usize,
}

impl GrowthCheck {
    fn new() -> Self {
        Self { pass: true, worst_margin: f64::INFINITY, t: f64::NAN, u_norm: f64::NAN, samples: 0 }
    }

    fn record(&mut self, margin: f64, violated: bool, t: f64, r: f64) {
        self.samples += 1;
        if violated {
            self.pass = false;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.t = t;
            self.u_norm = r;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub pass: bool,
    /// `|grad W(t, u)| <= xi(t) |u|^{p-1}`.
    pub w1: GrowthCheck,
    /// `|W(t, u)| >= eta |u|^nu` on the closure of `I`, `|u| <= delta`.
    pub w2: GrowthCheck,
    /// `grad W` against centered differences of `W`, `|u| >= 1e-2`.
    pub consistency: GrowthCheck,
}

const REL_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-5;
const FD_MIN_RADIUS: f64 = 1e-2;

/// Samples `(W1)`, `(W2)` and the `W`/`grad W` consistency on `mesh`.
pub fn verify_growth<T: Real>(nl: &Nonlinearity<T>, mesh: &GrowthMesh<T>) -> GrowthReport {
    let dirs = mesh.unit_directions();
    let mut w1 = GrowthCheck::new();
    let mut w2 = GrowthCheck::new();
    let mut fd = GrowthCheck::new();
    let d = mesh.dim;
    let mut g = vec![T::zero(); d];
    let mut up = vec![T::zero(); d];
    let mut down = vec![T::zero(); d];
    let p = nl.p.as_f64();
    let nu = nl.nu.as_f64();
    let eta = nl.eta.as_f64();
    for t in mesh.grid.times() {
        let tf = t.as_f64();
        let xi = nl.xi(t).as_f64();
        let in_i = mesh.vanishing.contains_closed(t);
        for &r in &mesh.radii {
            let rf = r.as_f64();
            for dir in &dirs {
                let u: Vec<T> = dir.iter().map(|&x| x * r).collect();
                nl.gradient(t, &u, &mut g);
                let gn = g.iter().map(|&x| x * x).sum::<T>().sqrt().as_f64();
                let cap = xi * rf.powf(p - 1.0);
                let m1 = cap - gn;
                w1.record(m1, m1 < -REL_TOL * cap.max(f64::MIN_POSITIVE), tf, rf);

                let w = nl.potential(t, &u).as_f64();
                if in_i && r <= nl.delta {
                    let floor = eta * rf.powf(nu);
                    let m2 = w.abs() - floor;
                    w2.record(m2, m2 < -REL_TOL * floor || !(w.abs() > 0.0), tf, rf);
                }

                if rf >= FD_MIN_RADIUS {
                    let h = T::lit(1e-4) * r;
                    for c in 0..d {
                        up.copy_from_slice(&u);
                        down.copy_from_slice(&u);
                        up[c] = up[c] + h;
                        down[c] = down[c] - h;
                        let diff = ((nl.potential(t, &up) - nl.potential(t, &down)) / (h + h)).as_f64();
                        let want = g[c].as_f64();
                        let scale = gn.max(f64::MIN_POSITIVE);
                        let err = (diff - want).abs() / scale;
                        if gn > 0.0 {
                            fd.record(FD_TOL - err, err > FD_TOL, tf, rf);
                        }
                    }
                }
            }
        }
    }
    if w2.samples == 0 {
        w2.pass = false;
    }
    GrowthReport { pass: w1.pass && w2.pass && fd.pass, w1, w2, consistency: fd }
}
