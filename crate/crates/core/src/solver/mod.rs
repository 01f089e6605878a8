//! Descent solvers for `I_lambda`, the Dirichlet problem on `I = (0, T)`, and
//! the `lambda` sweep that tracks concentration of minimizers onto `I`.

mod bvp;
mod config;
mod descent;
mod sweep;

pub use bvp::{bvp_weak_residual, interior_mask, interior_test_functions, solve_bvp, BvpResidual};
pub use config::SolverConfig;
pub use descent::{test_directions, HistoryEntry, SolveResult, StartPoint, StopReason};
pub use sweep::{
    concentration_sweep, minimize, minimize_from, uniform_bound_constant, SweepReport, SweepRow, SweepTrends,
    UNIFORM_BOUND_SAFETY,
};
