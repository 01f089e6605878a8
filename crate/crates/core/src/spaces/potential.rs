use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracops::{Grid, SampledSignal};
use crate::scalar::Real;

/// Open interval `(start, end)` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> Interval<T> {
    pub fn new(start: T, end: T) -> Result<Self> {
        if start.is_finite() && end.is_finite() && start < end {
            Ok(Self { start, end })
        } else {
            Err(Error::Interval { start: start.as_f64(), end: end.as_f64() })
        }
    }

    pub fn length(&self) -> T {
        self.end - self.start
    }

    pub fn contains_open(&self, t: T) -> bool {
        t > self.start && t < self.end
    }

    pub fn contains_closed(&self, t: T) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        other.start >= self.start && other.end <= self.end
    }

    /// Distance from `t` to the closed interval.
    pub fn distance(&self, t: T) -> T {
        (self.start - t).max(t - self.end).max(T::zero())
    }
}

type MatrixFn<T> = Arc<dyn Fn(T, &mut [T]) + Send + Sync>;
type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Positive semi-definite symmetric potential `L(t)` with its scalar lower
/// envelope `l(t)`, the threshold `k`, the kernel interval `J = int l^{-1}(0)`
/// and an interval `I` (inside `J`) on whose closure `L` vanishes.
#[derive(Clone)]
pub struct PotentialMatrix<T> {
    name: String,
    dim: usize,
    matrix: MatrixFn<T>,
    envelope: ScalarFn<T>,
    pub k: T,
    pub kernel: Interval<T>,
    pub vanishing: Interval<T>,
}

impl<T> fmt::Debug for PotentialMatrix<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialMatrix")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("k", &self.k)
            .field("kernel", &self.kernel)
            .field("vanishing", &self.vanishing)
            .finish_non_exhaustive()
    }
}

/// `min(1, dist(t, set)^2 / steepness)`.
fn quadratic_wall<T: Real>(set: Interval<T>, steepness: T) -> impl Fn(T) -> T + Clone {
    move |t| {
        let d = set.distance(t);
        (d * d / steepness).min(T::one())
    }
}

impl<T: Real> PotentialMatrix<T> {
    /// Arbitrary potential. `matrix` writes `L(t)` row-major into a `dim * dim` slice.
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        matrix: impl Fn(T, &mut [T]) + Send + Sync + 'static,
        envelope: impl Fn(T) -> T + Send + Sync + 'static,
        k: T,
        kernel: Interval<T>,
        vanishing: Interval<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter { name: "dim", reason: "must be positive".into() });
        }
        if !(k > T::zero()) {
            return Err(Error::Parameter { name: "k", reason: format!("must be positive, got {k}") });
        }
        Ok(Self { name: name.into(), dim, matrix: Arc::new(matrix), envelope: Arc::new(envelope), k, kernel, vanishing })
    }

    /// `l(t) = min(1, dist(t, J)^2 / steepness)` and `L(t) = min(1, dist(t, I)^2 / steepness) Id`.
    ///
    /// `L` vanishes exactly on the closure of `I`, so `I` is the set the
    /// minimizers concentrate on as `lambda` grows.
    pub fn well(dim: usize, vanishing: Interval<T>, kernel: Interval<T>, k: T, steepness: T) -> Result<Self> {
        check_steepness(steepness)?;
        let wall = quadratic_wall(vanishing, steepness);
        Self::custom(
            "well",
            dim,
            move |t, out| fill_scaled_identity(out, dim, wall(t)),
            quadratic_wall(kernel, steepness),
            k,
            kernel,
            vanishing,
        )
    }

    /// `L(t) = l(t) Id` with `l(t) = min(1, dist(t, J)^2 / steepness)`: `L` vanishes on all of `J`.
    pub fn envelope(dim: usize, vanishing: Interval<T>, kernel: Interval<T>, k: T, steepness: T) -> Result<Self> {
        check_steepness(steepness)?;
        let wall = quadratic_wall(kernel, steepness);
        Self::custom(
            "envelope",
            dim,
            {
                let wall = wall.clone();
                move |t, out| fill_scaled_identity(out, dim, wall(t))
            },
            wall,
            k,
            kernel,
            vanishing,
        )
    }

    /// 2x2 potential `R(angle) diag(a, b) R(angle)^T` with `a` the well profile of
    /// [`Self::well`] and `b = a + l / 2`.
    pub fn rotated(vanishing: Interval<T>, kernel: Interval<T>, k: T, steepness: T, angle: T) -> Result<Self> {
        check_steepness(steepness)?;
        let a_fn = quadratic_wall(vanishing, steepness);
        let l_fn = quadratic_wall(kernel, steepness);
        let (s, c) = angle.sin_cos();
        Self::custom(
            "rotated",
            2,
            {
                let l_fn = l_fn.clone();
                move |t, out| {
                    let a = a_fn(t);
                    let b = a + l_fn(t) / T::lit(2.0);
                    out[0] = c * c * a + s * s * b;
                    out[1] = c * s * (a - b);
                    out[2] = out[1];
                    out[3] = s * s * a + c * c * b;
                }
            },
            l_fn,
            k,
            kernel,
            vanishing,
        )
    }

    /// `L = 0`, `l = 0` with the given intervals; violates `(L2)` on any finite grid.
    pub fn zero(dim: usize, vanishing: Interval<T>, kernel: Interval<T>, k: T) -> Result<Self> {
        Self::custom("zero", dim, |_, out| out.iter_mut().for_each(|v| *v = T::zero()), |_| T::zero(), k, kernel, vanishing)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_at(&self, t: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim * self.dim];
        (self.matrix)(t, &mut out);
        out
    }

    pub fn envelope_at(&self, t: T) -> T {
        (self.envelope)(t)
    }

    /// Returns a copy with the matrix replaced by `L(t) + perturbation(t)`.
    pub fn perturbed(&self, name: impl Into<String>, perturbation: impl Fn(T, &mut [T]) + Send + Sync + 'static) -> Self {
        let base = self.matrix.clone();
        let dim = self.dim;
        let mut out = self.clone();
        out.name = name.into();
        out.matrix = Arc::new(move |t, m: &mut [T]| {
            base(t, m);
            let mut extra = vec![T::zero(); dim * dim];
            perturbation(t, &mut extra);
            m.iter_mut().zip(extra).for_each(|(a, b)| *a = *a + b);
        });
        out
    }

    pub fn sample(&self, grid: &Grid<T>) -> SampledPotential<T> {
        let nn = self.dim * self.dim;
        let mut matrices = vec![T::zero(); grid.len() * nn];
        for (i, m) in matrices.chunks_mut(nn).enumerate() {
            (self.matrix)(grid.time(i), m);
        }
        let envelope = grid.times().map(|t| (self.envelope)(t)).collect();
        SampledPotential { grid: *grid, dim: self.dim, matrices, envelope }
    }
}

fn check_steepness<T: Real>(steepness: T) -> Result<()> {
    if steepness > T::zero() && steepness.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name: "steepness", reason: format!("must be positive, got {steepness}") })
    }
}

fn fill_scaled_identity<T: Real>(out: &mut [T], dim: usize, s: T) {
    for r in 0..dim {
        for c in 0..dim {
            out[r * dim + c] = if r == c { s } else { T::zero() };
        }
    }
}

/// `L` and `l` evaluated on a grid.
#[derive(Debug, Clone)]
pub struct SampledPotential<T> {
    grid: Grid<T>,
    dim: usize,
    matrices: Vec<T>,
    envelope: Vec<T>,
}

impl<T: Real> SampledPotential<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, i: usize) -> &[T] {
        let nn = self.dim * self.dim;
        &self.matrices[i * nn..(i + 1) * nn]
    }

    pub fn envelope(&self) -> &[T] {
        &self.envelope
    }

    /// `L(t_i) x`.
    pub fn apply_at(&self, i: usize, x: &[T], out: &mut [T]) {
        let m = self.matrix(i);
        for (r, o) in out.iter_mut().enumerate() {
            *o = m[r * self.dim..(r + 1) * self.dim].iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }

    /// `(L(t_i) x, y)`.
    pub fn form_at(&self, i: usize, x: &[T], y: &[T]) -> T {
        let m = self.matrix(i);
        let d = self.dim;
        let mut acc = T::zero();
        for r in 0..d {
            let row: T = m[r * d..(r + 1) * d].iter().zip(x).map(|(&a, &b)| a * b).sum();
            acc = acc + row * y[r];
        }
        acc
    }

    /// `int (L(t) u, v) dt`.
    pub fn form(&self, u: &SampledSignal<T>, v: &SampledSignal<T>) -> T {
        (0..self.grid.len()).map(|i| self.form_at(i, u.point(i), v.point(i))).sum::<T>() * self.grid.dt()
    }

    /// `t -> L(t) u(t)`.
    pub fn apply(&self, u: &SampledSignal<T>) -> SampledSignal<T> {
        let mut out = SampledSignal::zeros(*u.grid(), u.dim());
        let d = u.dim();
        for i in 0..self.grid.len() {
            let mut buf = vec![T::zero(); d];
            self.apply_at(i, u.point(i), &mut buf);
            out.values_mut()[i * d..(i + 1) * d].copy_from_slice(&buf);
        }
        out
    }

    /// `int l(t) |u(t)|^2 dt`.
    pub fn envelope_mass(&self, u: &SampledSignal<T>) -> T {
        u.pointwise_norms().zip(&self.envelope).map(|(a, &l)| l * a * a).sum::<T>() * self.grid.dt()
    }
}

/// Hypotheses checked by [`verify_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// Grid covers `J` with a margin of `|J|` on each side.
    Coverage,
    /// `L(t)` symmetric.
    Symmetry,
    /// `l >= 0` and `(L(t) x, x) >= l(t) |x|^2`.
    Envelope,
    /// `{l < k}` nonempty.
    Sublevel,
    /// `l = 0` exactly on the closure of `J`.
    Kernel,
    /// `l^{-1}(0)` is a bounded interval inside the grid.
    Finiteness,
    /// `I` inside `J` and `L = 0` on the closure of `I`.
    Vanishing,
}

impl Hypothesis {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Coverage => "grid coverage",
            Self::Symmetry => "(L1) symmetry",
            Self::Envelope => "(L1) envelope",
            Self::Sublevel => "(L1) sublevel set",
            Self::Kernel => "(L2) kernel interval",
            Self::Finiteness => "(L2) finiteness",
            Self::Vanishing => "(L3) vanishing block",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    pub label: &'static str,
    /// First offending time, when the violation is pointwise.
    pub t: Option<f64>,
    /// Number of offending grid points.
    pub count: usize,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl PotentialReport {
    pub fn fails(&self, h: Hypothesis) -> bool {
        self.violations.iter().any(|v| v.hypothesis == h)
    }
}

#[derive(Default)]
struct Tally {
    first: Option<f64>,
    count: usize,
    worst: f64,
}

impl Tally {
    fn hit(&mut self, t: f64, amount: f64) {
        self.first.get_or_insert(t);
        self.count += 1;
        self.worst = self.worst.max(amount);
    }

    fn into_violation(self, h: Hypothesis) -> Option<Violation> {
        (self.count > 0).then(|| Violation { hypothesis: h, label: h.label(), t: self.first, count: self.count, worst: self.worst })
    }
}

const SYMMETRY_TOL: f64 = 1e-12;
const VANISHING_TOL: f64 = 1e-14;
const PROBES_PER_POINT: usize = 4;

/// Checks `(L1)-(L3)` at grid resolution. Failures are data, not errors.
pub fn verify_potential<T: Real>(p: &PotentialMatrix<T>, grid: &Grid<T>) -> PotentialReport {
    let sampled = p.sample(grid);
    let d = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tallies: Vec<(Hypothesis, Tally)> = [
        Hypothesis::Coverage,
        Hypothesis::Symmetry,
        Hypothesis::Envelope,
        Hypothesis::Sublevel,
        Hypothesis::Kernel,
        Hypothesis::Finiteness,
        Hypothesis::Vanishing,
    ]
    .into_iter()
    .map(|h| (h, Tally::default()))
    .collect();
    let mut tally = |h: Hypothesis, t: f64, amount: f64| {
        tallies.iter_mut().find(|(k, _)| *k == h).expect("all hypotheses tallied").1.hit(t, amount);
    };

    let j = p.kernel;
    let t_lo = grid.t_min();
    let t_hi = grid.time(grid.len() - 1);
    if j.start - j.length() < t_lo || j.end + j.length() > t_hi {
        tally(Hypothesis::Coverage, j.start.as_f64(), j.length().as_f64());
    }
    if !p.kernel.contains_interval(&p.vanishing) {
        tally(Hypothesis::Vanishing, p.vanishing.start.as_f64(), p.vanishing.length().as_f64());
    }

    let mut any_sublevel = false;
    for i in 0..grid.len() {
        let t = grid.time(i);
        let tf = t.as_f64();
        let m = sampled.matrix(i);
        let l = sampled.envelope()[i];
        let scale = m.iter().fold(T::one(), |acc, v| acc.max(v.abs())).as_f64();

        let mut asym = 0.0f64;
        for r in 0..d {
            for c in 0..r {
                asym = asym.max((m[r * d + c] - m[c * d + r]).abs().as_f64());
            }
        }
        if asym > SYMMETRY_TOL {
            tally(Hypothesis::Symmetry, tf, asym);
        }

        if l < T::zero() {
            tally(Hypothesis::Envelope, tf, -l.as_f64());
        }
        for _ in 0..PROBES_PER_POINT {
            let x: Vec<T> = (0..d).map(|_| T::lit(StandardNormal.sample(&mut rng))).collect();
            let norm2: T = x.iter().map(|&v| v * v).sum();
            let gap = (sampled.form_at(i, &x, &x) - l * norm2).as_f64();
            if gap < -1e-12 * scale * norm2.as_f64() {
                tally(Hypothesis::Envelope, tf, -gap / norm2.as_f64());
            }
        }

        if l < p.k {
            any_sublevel = true;
        }
        let in_kernel = j.contains_closed(t);
        if in_kernel && l != T::zero() {
            tally(Hypothesis::Kernel, tf, l.as_f64());
        }
        if !in_kernel && !(l > T::zero()) {
            tally(Hypothesis::Kernel, tf, 0.0);
        }

        if p.vanishing.contains_closed(t) {
            let worst = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs().as_f64()));
            if worst > VANISHING_TOL {
                tally(Hypothesis::Vanishing, tf, worst);
            }
        }
    }
    if !any_sublevel {
        tally(Hypothesis::Sublevel, t_lo.as_f64(), 0.0);
    }
    for (i, t) in [(0, t_lo), (grid.len() - 1, t_hi)] {
        if sampled.envelope()[i] == T::zero() {
            tally(Hypothesis::Finiteness, t.as_f64(), 0.0);
        }
    }

    let violations: Vec<Violation> = tallies.into_iter().filter_map(|(h, t)| t.into_violation(h)).collect();
    PotentialReport { pass: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intervals() -> (Interval<f64>, Interval<f64>) {
        (Interval::new(0.0, 0.5).unwrap(), Interval::new(-0.25, 0.75).unwrap())
    }

    fn grid() -> Grid<f64> {
        Grid::centered(4096, 32.0).unwrap()
    }

    #[test]
    fn interval_validation_and_distance() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        let i = Interval::new(0.0, 0.5).unwrap();
        assert_eq!(i.distance(0.25), 0.0);
        assert_eq!(i.distance(-1.0), 1.0);
        assert_eq!(i.distance(0.75), 0.25);
    }

    #[test]
    fn presets_pass() {
        let (i, j) = intervals();
        for p in [
            PotentialMatrix::well(1, i, j, 0.9, 0.0025).unwrap(),
            PotentialMatrix::envelope(1, i, j, 0.9, 0.0025).unwrap(),
            PotentialMatrix::rotated(i, j, 0.9, 0.0025, 0.7).unwrap(),
        ] {
            let r = verify_potential(&p, &grid());
            assert!(r.pass, "{}: {:?}", p.name(), r.violations);
        }
    }

    #[test]
    fn degenerate_kernel_fails_finiteness() {
        let g = grid();
        let whole = Interval::new(g.t_min(), g.time(g.len() - 1)).unwrap();
        let p = PotentialMatrix::zero(1, Interval::new(0.0, 0.5).unwrap(), whole, 0.9).unwrap();
        let r = verify_potential(&p, &g);
        assert!(!r.pass);
        assert!(r.fails(Hypothesis::Finiteness));
    }

    #[test]
    fn antisymmetric_perturbation_fails_symmetry() {
        let (i, j) = intervals();
        let p = PotentialMatrix::rotated(i, j, 0.9, 0.0025, 0.3).unwrap().perturbed("skewed", |_, m| {
            m[1] = 1e-3;
            m[2] = -1e-3;
        });
        let r = verify_potential(&p, &grid());
        assert!(r.fails(Hypothesis::Symmetry));
        let v = r.violations.iter().find(|v| v.hypothesis == Hypothesis::Symmetry).unwrap();
        assert!((v.worst - 2e-3).abs() < 1e-12);
        assert_eq!(v.t, Some(-16.0));
    }

    #[test]
    fn envelope_above_matrix_fails() {
        let (i, j) = intervals();
        let p = PotentialMatrix::custom("bad", 1, |_, m| m[0] = 0.1, |_| 0.5, 0.9, j, i).unwrap();
        let r = verify_potential(&p, &grid());
        assert!(r.fails(Hypothesis::Envelope));
        assert!(r.fails(Hypothesis::Kernel));
        assert!(r.fails(Hypothesis::Vanishing));
    }

    #[test]
    fn vanishing_block_checked_on_closure() {
        let (i, j) = intervals();
        let p = PotentialMatrix::custom(
            "leaky",
            1,
            |t: f64, m| m[0] = if t == 0.5 { 0.01 } else { 0.0f64.max(-t).max(t - 1.0) },
            |t: f64| 0.0f64.max(-t - 0.25).max(t - 0.75).min(1.0),
            0.9,
            j,
            i,
        )
        .unwrap();
        let r = verify_potential(&p, &grid());
        let v = r.violations.iter().find(|v| v.hypothesis == Hypothesis::Vanishing).unwrap();
        assert_eq!(v.t, Some(0.5));
    }
}
