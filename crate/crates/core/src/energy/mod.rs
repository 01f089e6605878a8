//! The energy functional
//!
//! ```text
//! I_lambda(u) = (1/2) ||u||_lambda^2 - int W(t, u) dt
//! ```
//!
//! with its derivative, its `L^2` gradient, the coercivity lower bound valid
//! for `lambda >= Lambda`, and a negative-energy point built from a bump
//! supported where `L` vanishes. Nonlinearities carry their growth data and
//! [`verify_growth`] samples the growth hypotheses.

mod functional;
mod growth;
mod nonlinearity;
mod problem;
mod witness;

pub use functional::{
    coercivity_bound, directional_derivative, energy_parts, energy_report, evaluate_energy, gradient, lower_bound, xi_norm,
    CoercivityBound, EnergyParts, EnergyReport, XiNorm,
};
pub use growth::{verify_growth, GrowthCheck, GrowthMesh, GrowthReport};
pub use nonlinearity::{gaussian_weight, Nonlinearity};
pub use problem::Problem;
pub use witness::{bump, negative_energy_witness, Witness, WitnessSummary, WITNESS_FLOOR};

pub(crate) use functional::{energy_change, lambda_inner};
