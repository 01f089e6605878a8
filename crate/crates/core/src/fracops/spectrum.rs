use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::signal::{Grid, SampledSignal};
use crate::error::{Error, Result};
use crate::scalar::Real;

thread_local! {
    // Plans are immutable once built and confined to the thread that built them.
    static PLANS: RefCell<HashMap<(TypeId, usize, bool), Box<dyn Any>>> = RefCell::new(HashMap::new());
}

pub(crate) fn plan<T: Real>(len: usize, forward: bool) -> Arc<dyn Fft<T>> {
    PLANS.with(|plans| {
        let mut plans = plans.borrow_mut();
        let entry = plans.entry((TypeId::of::<T>(), len, forward)).or_insert_with(|| {
            let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
            let fft: Arc<dyn Fft<T>> = FftPlanner::new().plan_fft(len, dir);
            Box::new(fft)
        });
        entry.downcast_ref::<Arc<dyn Fft<T>>>().expect("plan type keyed by TypeId").clone()
    })
}

/// Continuous Fourier transform `u^(w) = int e^{-i t w} u(t) dt` of a sampled signal,
/// evaluated at the grid frequencies.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    grid: Grid<T>,
    dim: usize,
    frequencies: Vec<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Angular frequencies in FFT order.
    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    /// Coefficients stored frequency-major: `coeffs[k * dim + c]`.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize, c: usize) -> Complex<T> {
        self.coeffs[k * self.dim + c]
    }
}

/// Raw unnormalized DFT of one component.
pub(crate) fn dft_component<T: Real>(u: &SampledSignal<T>, c: usize) -> Vec<Complex<T>> {
    let mut buf: Vec<Complex<T>> = u.values().iter().skip(c).step_by(u.dim()).map(|&v| Complex::new(v, T::zero())).collect();
    plan::<T>(buf.len(), true).process(&mut buf);
    buf
}

pub fn fft_forward<T: Real>(u: &SampledSignal<T>) -> Result<Spectrum<T>> {
    if let Some(idx) = u.values().iter().position(|v| !v.is_finite()) {
        let i = idx / u.dim();
        return Err(Error::NonFinite { index: i, t: u.grid().time(i).as_f64() });
    }
    let grid = *u.grid();
    let n = grid.len();
    let dim = u.dim();
    let frequencies: Vec<T> = (0..n).map(|k| grid.frequency(k)).collect();
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); n * dim];
    for c in 0..dim {
        let raw = dft_component(u, c);
        for (k, z) in raw.into_iter().enumerate() {
            // t_j = t_min + j dt  =>  sum_j e^{-i w t_j} u_j dt = dt e^{-i w t_min} DFT_k
            let phase = Complex::from_polar(grid.dt(), -frequencies[k] * grid.t_min());
            coeffs[k * dim + c] = z * phase;
        }
    }
    Ok(Spectrum { grid, dim, frequencies, coeffs })
}

/// Exact discrete inverse of [`fft_forward`]; the imaginary part must be roundoff.
pub fn fft_inverse<T: Real>(s: &Spectrum<T>) -> Result<SampledSignal<T>> {
    let grid = s.grid;
    let n = grid.len();
    let mut components = Vec::with_capacity(s.dim);
    let mut worst = T::zero();
    for c in 0..s.dim {
        let mut buf: Vec<Complex<T>> = (0..n)
            .map(|k| s.coeff(k, c) * Complex::from_polar(grid.dt().recip(), s.frequencies[k] * grid.t_min()))
            .collect();
        plan::<T>(n, false).process(&mut buf);
        let scale = T::from_usize_lossy(n).recip();
        let (re, r) = split_real(&buf, scale);
        worst = worst.max(r);
        components.push(re);
    }
    if worst > T::residue_tolerance() {
        return Err(Error::ImaginaryResidue { residue: worst.as_f64() });
    }
    SampledSignal::from_components(grid, &components)
}

/// Scales by `scale` and returns the real part plus the relative imaginary residue.
fn split_real<T: Real>(buf: &[Complex<T>], scale: T) -> (Vec<T>, T) {
    let re: Vec<T> = buf.iter().map(|z| z.re * scale).collect();
    let im_max = buf.iter().map(|z| (z.im * scale).abs()).fold(T::zero(), T::max);
    let re_max = re.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let residue = if im_max == T::zero() { T::zero() } else { im_max / re_max.max(T::min_positive_value()) };
    (re, residue)
}

/// Applies the Fourier multiplier `symbol(k)` (bin index) to every component.
pub(crate) fn apply_symbol<T: Real>(u: &SampledSignal<T>, symbol: impl Fn(usize) -> Complex<T>) -> Result<SampledSignal<T>> {
    let n = u.len();
    let scale = T::from_usize_lossy(n).recip();
    let inverse = plan::<T>(n, false);
    let symbols: Vec<Complex<T>> = (0..n).map(&symbol).collect();
    let mut components = Vec::with_capacity(u.dim());
    let mut worst = T::zero();
    for c in 0..u.dim() {
        let mut buf = dft_component(u, c);
        buf.iter_mut().zip(&symbols).for_each(|(z, s)| *z = *z * s);
        inverse.process(&mut buf);
        let (re, r) = split_real(&buf, scale);
        worst = worst.max(r);
        components.push(re);
    }
    if worst > T::residue_tolerance() {
        return Err(Error::ImaginaryResidue { residue: worst.as_f64() });
    }
    SampledSignal::from_components(*u.grid(), &components)
}

/// `sum_k weight(k) |DFT_k|^2 * dt / N`, summed over components.
pub(crate) fn weighted_power<T: Real>(u: &SampledSignal<T>, weight: impl Fn(usize) -> T) -> T {
    let n = u.len();
    let w: Vec<T> = (0..n).map(weight).collect();
    let mut total = T::zero();
    for c in 0..u.dim() {
        let f = dft_component(u, c);
        total = total + f.iter().zip(&w).map(|(z, &wk)| wk * z.norm_sqr()).sum::<T>();
    }
    total * u.grid().dt() / T::from_usize_lossy(n)
}

/// `sum_k weight(k) Re(F_u conj F_v) * dt / N`, summed over components.
pub(crate) fn weighted_cross<T: Real>(u: &SampledSignal<T>, v: &SampledSignal<T>, weight: impl Fn(usize) -> T) -> T {
    let n = u.len();
    let w: Vec<T> = (0..n).map(weight).collect();
    let mut total = T::zero();
    for c in 0..u.dim() {
        let fu = dft_component(u, c);
        let fv = dft_component(v, c);
        total = total + fu.iter().zip(&fv).zip(&w).map(|((a, b), &wk)| wk * (a * b.conj()).re).sum::<T>();
    }
    total * u.grid().dt() / T::from_usize_lossy(n)
}
