use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic sampling grid `t_i = t_min + i * dt`, `i < len`.
///
/// The represented domain `[t_min, t_min + len * dt)` is one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid<T> {
    t_min: T,
    dt: T,
    len: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(t_min: T, dt: T, len: usize) -> Result<Self> {
        if len < 8 || !len.is_power_of_two() {
            return Err(Error::GridLength(len));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::GridSpacing(dt.as_f64()));
        }
        if !t_min.is_finite() {
            return Err(Error::Parameter { name: "t_min", reason: "must be finite".into() });
        }
        Ok(Self { t_min, dt, len })
    }

    /// Grid of `len` points covering `[-length/2, length/2)`.
    pub fn centered(len: usize, length: T) -> Result<Self> {
        if len == 0 {
            return Err(Error::GridLength(len));
        }
        Self::new(-length / T::lit(2.0), length / T::from_usize_lossy(len), len)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn t_min(&self) -> T {
        self.t_min
    }

    /// Length of one period.
    #[inline]
    pub fn length(&self) -> T {
        self.dt * T::from_usize_lossy(self.len)
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        self.t_min + self.dt * T::from_usize_lossy(i)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len).map(move |i| self.time(i))
    }

    /// Signed FFT mode index of bin `k`; the Nyquist bin maps to `-len/2`.
    #[inline]
    pub fn mode(&self, k: usize) -> isize {
        let n = self.len as isize;
        let k = k as isize;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Angular frequency `w_k = 2 pi m_k / (len dt)`.
    #[inline]
    pub fn frequency(&self, k: usize) -> T {
        let m = self.mode(k);
        T::lit(2.0) * T::PI() * T::from_isize(m).unwrap() / self.length()
    }

    #[inline]
    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.len / 2
    }

    /// Same grid with half the spacing over the same window.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.t_min, self.dt / T::lit(2.0), self.len * 2)
    }

    pub(crate) fn same_as(&self, other: &Self) -> bool {
        self.len == other.len && self.dt == other.dt && self.t_min == other.t_min
    }
}

/// A function `R -> R^dim` sampled on a [`Grid`]. Values are stored point-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    grid: Grid<T>,
    dim: usize,
    values: Vec<T>,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(grid: Grid<T>, dim: usize, values: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter { name: "dim", reason: "must be positive".into() });
        }
        if values.len() != grid.len() * dim {
            return Err(Error::ValueCount { expected: grid.len() * dim, got: values.len() });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let i = idx / dim;
            return Err(Error::NonFinite { index: i, t: grid.time(i).as_f64() });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn zeros(grid: Grid<T>, dim: usize) -> Self {
        Self { grid, dim, values: vec![T::zero(); grid.len() * dim] }
    }

    /// Samples a scalar function.
    pub fn from_scalar_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(grid, 1, grid.times().map(f).collect())
    }

    /// Samples a vector function; `f` writes `dim` components.
    pub fn from_fn(grid: Grid<T>, dim: usize, f: impl Fn(T, &mut [T])) -> Result<Self> {
        let mut values = vec![T::zero(); grid.len() * dim];
        for (i, chunk) in values.chunks_mut(dim.max(1)).enumerate() {
            f(grid.time(i), chunk);
        }
        Self::new(grid, dim, values)
    }

    /// Builds a signal from per-component sample vectors.
    pub fn from_components(grid: Grid<T>, components: &[Vec<T>]) -> Result<Self> {
        let dim = components.len();
        let mut values = vec![T::zero(); grid.len() * dim];
        for (c, comp) in components.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(Error::ValueCount { expected: grid.len(), got: comp.len() });
            }
            for (i, v) in comp.iter().enumerate() {
                values[i * dim + c] = *v;
            }
        }
        Self::new(grid, dim, values)
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Mutable access to the raw samples. Callers must keep them finite.
    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn get(&self, i: usize, c: usize) -> T {
        self.values[i * self.dim + c]
    }

    pub fn component(&self, c: usize) -> Vec<T> {
        self.values.iter().skip(c).step_by(self.dim).copied().collect()
    }

    pub fn is_compatible(&self, other: &Self) -> bool {
        self.dim == other.dim && self.grid.same_as(&other.grid)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid, dim: self.dim, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: T, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + s * b).collect();
        Ok(Self { grid: self.grid, dim: self.dim, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-T::one(), other)
    }

    /// `int (u, v) dt` by the periodic trapezoid rule.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).sum::<T>() * self.grid.dt())
    }

    pub fn norm_l2(&self) -> T {
        (self.values.iter().map(|&v| v * v).sum::<T>() * self.grid.dt()).sqrt()
    }

    /// `(int |u|^r dt)^(1/r)` with the Euclidean pointwise norm.
    pub fn norm_lr(&self, r: T) -> T {
        (self.pointwise_norms().map(|a| a.powf(r)).sum::<T>() * self.grid.dt()).powf(r.recip())
    }

    /// `max_t |u(t)|`.
    pub fn sup_norm(&self) -> T {
        self.pointwise_norms().fold(T::zero(), T::max)
    }

    pub fn pointwise_norms(&self) -> impl Iterator<Item = T> + '_ {
        self.values.chunks(self.dim).map(|p| p.iter().map(|&v| v * v).sum::<T>().sqrt())
    }

    /// Arithmetic mean of each component.
    pub fn means(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.len());
        (0..self.dim).map(|c| self.values.iter().skip(c).step_by(self.dim).copied().sum::<T>() / n).collect()
    }

    /// `t -> u(-t)` on the reflected periodic window `[-t_min, -t_min + length)`.
    pub fn reflect(&self) -> Self {
        let n = self.len();
        let grid = Grid { t_min: -self.grid.t_min, ..self.grid };
        let mut values = vec![T::zero(); self.values.len()];
        for i in 0..n {
            let j = (n - i) % n;
            values[i * self.dim..(i + 1) * self.dim].copy_from_slice(self.point(j));
        }
        Self { grid, dim: self.dim, values }
    }

    /// Copy with the values at masked-out points set to zero.
    pub fn masked(&self, free: &[bool]) -> Self {
        let mut out = self.clone();
        for (i, &keep) in free.iter().enumerate() {
            if !keep {
                out.values[i * self.dim..(i + 1) * self.dim].iter_mut().for_each(|v| *v = T::zero());
            }
        }
        out
    }

    pub fn cast<U: Real>(&self) -> SampledSignal<U> {
        SampledSignal {
            grid: Grid { t_min: U::lit(self.grid.t_min.as_f64()), dt: U::lit(self.grid.dt.as_f64()), len: self.grid.len },
            dim: self.dim,
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}
