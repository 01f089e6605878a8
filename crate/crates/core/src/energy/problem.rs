use crate::error::{Error, Result};
use crate::fracops::{FracOrder, Grid};
use crate::scalar::Real;
use crate::spaces::{EmbeddingConstants, PotentialMatrix, SampledPotential};

use super::nonlinearity::Nonlinearity;

/// One instance of `D^a(D^a u) + lambda L(t) u = grad W(t, u)` on a grid.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    order: FracOrder<T>,
    grid: Grid<T>,
    potential: PotentialMatrix<T>,
    sampled: SampledPotential<T>,
    nonlinearity: Nonlinearity<T>,
    xi: Vec<T>,
    lambda: T,
    constants: EmbeddingConstants<T>,
}

impl<T: Real> Problem<T> {
    pub fn new(
        order: FracOrder<T>,
        grid: Grid<T>,
        potential: PotentialMatrix<T>,
        nonlinearity: Nonlinearity<T>,
        lambda: T,
        constants: EmbeddingConstants<T>,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        let sampled = potential.sample(&grid);
        let xi = grid.times().map(|t| nonlinearity.xi(t)).collect();
        Ok(Self { order, grid, potential, sampled, nonlinearity, xi, lambda, constants })
    }

    /// Same problem at another `lambda`.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, ..self.clone() })
    }

    /// Same problem with another nonlinearity.
    pub fn with_nonlinearity(&self, nonlinearity: Nonlinearity<T>) -> Self {
        let xi = self.grid.times().map(|t| nonlinearity.xi(t)).collect();
        Self { nonlinearity, xi, ..self.clone() }
    }

    pub fn order(&self) -> FracOrder<T> {
        self.order
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn potential(&self) -> &PotentialMatrix<T> {
        &self.potential
    }

    pub fn sampled_potential(&self) -> &SampledPotential<T> {
        &self.sampled
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.nonlinearity
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn constants(&self) -> &EmbeddingConstants<T> {
        &self.constants
    }

    pub(crate) fn xi_samples(&self) -> &[T] {
        &self.xi
    }

    pub(crate) fn require_threshold(&self) -> Result<()> {
        if self.lambda < self.constants.lambda_threshold {
            Err(Error::BelowThreshold { lambda: self.lambda.as_f64(), threshold: self.constants.lambda_threshold.as_f64() })
        } else {
            Ok(())
        }
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name: "lambda", reason: format!("must be positive and finite, got {lambda}") })
    }
}
