//! Liouville-Weyl fractional calculus on a truncated periodic grid.
//!
//! Every operator is a Fourier multiplier applied through the FFT, with the
//! conventions `u^(w) = int e^{-itw} u(t) dt` and principal branch
//! `(+-iw)^a = |w|^a e^{+-i a pi sgn(w) / 2}`.

mod operators;
mod oracle;
mod selftest;
mod signal;
mod spectrum;

pub use operators::{
    left_derivative, left_integral, right_derivative, right_integral, riesz_composition, seminorm_alpha, sobolev_norm,
    FracOrder,
};
pub use oracle::quadrature_left_derivative;
pub use selftest::{gaussian_oracle_error, operator_laws, operator_selftest, SelftestCheck, SelftestReport};
pub use signal::{Grid, SampledSignal};
pub use spectrum::{fft_forward, fft_inverse, Spectrum};

pub(crate) use operators::{seminorm_sq, shifted_riesz_inverse};
pub(crate) use spectrum::weighted_cross;
