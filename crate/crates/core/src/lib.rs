//! Variational numerics for fractional Hamiltonian systems
//!
//! ```text
//! _tD^a_inf (_{-inf}D^a_t u) + lambda L(t) u = grad W(t, u),   t in R
//! ```
//!
//! The crate provides spectral Liouville-Weyl operators ([`fracops`]), the
//! weighted spaces and their embedding constants ([`spaces`]), the energy
//! functional with its derivative and certified lower bound ([`energy`]), and
//! a descent solver with a lambda sweep that exhibits concentration of the
//! minimizers onto the set where `L` vanishes ([`solver`]).
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the tolerances are tuned for.

pub mod energy;
pub mod error;
pub mod fracops;
pub mod random;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Real;

pub type Grid = fracops::Grid<f64>;
pub type Signal = fracops::SampledSignal<f64>;
pub type Order = fracops::FracOrder<f64>;
pub type Potential = spaces::PotentialMatrix<f64>;
pub type Constants = spaces::EmbeddingConstants<f64>;
pub type Nonlinearity = energy::Nonlinearity<f64>;
pub type Problem = energy::Problem<f64>;
pub type SolveResult = solver::SolveResult<f64>;
pub type SweepReport = solver::SweepReport<f64>;
pub type Scenario = scenario::Scenario<f64>;
