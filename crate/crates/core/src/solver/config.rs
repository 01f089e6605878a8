use serde::Serialize;

use crate::error::{Error, Result};

/// Descent settings. Every field is echoed into run manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `||gradient||_{L^2}` is at or below this.
    pub grad_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking factor.
    pub shrink: f64,
    pub max_backtracks: usize,
    /// L-BFGS history length; 0 gives (preconditioned) steepest descent.
    pub memory: usize,
    /// Shift `mu` of the preconditioner `(|w|^{2 alpha} + mu)^{-1}` used as the
    /// initial inverse Hessian; `None` uses the identity.
    pub precondition_shift: Option<f64>,
    /// Seeds the random test directions of the residual probe.
    pub seed: u64,
    pub probes: usize,
    /// Seed each sweep point with the previous solution.
    pub warm_start: bool,
    /// Worker cap for sweeps without warm starts.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-8,
            armijo: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
            memory: 10,
            precondition_shift: Some(10.0),
            seed: 7,
            probes: 20,
            warm_start: true,
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| Err(Error::Parameter { name, reason: reason.into() });
        if self.max_iters == 0 {
            return bad("max_iters", "must be positive");
        }
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return bad("grad_tol", "must be positive");
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return bad("armijo", "must lie in (0, 1/2)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink", "must lie in (0, 1)");
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks", "must be positive");
        }
        if let Some(mu) = self.precondition_shift {
            if !(mu > 0.0 && mu.is_finite()) {
                return bad("precondition_shift", "must be positive");
            }
        }
        if self.threads == 0 {
            return bad("threads", "must be positive");
        }
        Ok(())
    }
}
