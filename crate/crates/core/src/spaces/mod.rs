//! Problem data and the weighted spaces `X^alpha`, `X_lambda`.
//!
//! [`PotentialMatrix`] carries `L(t)` with its hypotheses, [`verify_potential`]
//! checks them on a grid, and [`EmbeddingConstants`] holds the Sobolev constant,
//! the sublevel measure and the derived `theta_0` and threshold `Lambda`.

mod constants;
mod norms;
mod potential;

pub use constants::{
    discrete_sobolev_constant, estimate_sobolev_constant, measure_sublevel, sobolev_constant_quadrature,
    sobolev_ensemble_max, EmbeddingConstants, SOBOLEV_SAFETY,
};
pub use norms::{embedding_bounds, lambda_norm, lambda_norm_sq, x_norm, EmbeddingReport, Margin, EMBEDDING_EXPONENTS};
pub use potential::{verify_potential, Hypothesis, Interval, PotentialMatrix, PotentialReport, SampledPotential, Violation};

pub(crate) use norms::check_potential_grid;
