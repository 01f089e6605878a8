//! Named problem setups built from a handful of scalar parameters.

use serde::Serialize;

use crate::energy::{Nonlinearity, Problem};
use crate::error::{Error, Result};
use crate::fracops::{FracOrder, Grid};
use crate::scalar::Real;
use crate::spaces::{EmbeddingConstants, Interval, PotentialMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PotentialPreset {
    /// `L = min(1, dist(t, I)^2 / steepness) Id`, vanishing exactly on the closure of `I`.
    Well,
    /// `L = l Id`, vanishing on all of `J`.
    Envelope,
    /// Rotation-conjugated 2x2 diagonal potential.
    Rotated { angle: f64 },
    /// `L = 0`, `l = 0`.
    Zero,
}

impl PotentialPreset {
    pub fn parse(name: &str, angle: f64) -> Option<Self> {
        match name {
            "well" => Some(Self::Well),
            "envelope" => Some(Self::Envelope),
            "rotated" => Some(Self::Rotated { angle }),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Well => "well",
            Self::Envelope => "envelope",
            Self::Rotated { .. } => "rotated",
            Self::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityPreset {
    Power,
    PowerRegularized,
    Zero,
}

impl NonlinearityPreset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "power" => Some(Self::Power),
            "power-regularized" => Some(Self::PowerRegularized),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Power => "power",
            Self::PowerRegularized => "power-regularized",
            Self::Zero => "zero",
        }
    }
}

/// Every scalar that determines a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioParams {
    pub alpha: f64,
    pub vanishing: (f64, f64),
    pub kernel: (f64, f64),
    pub k: f64,
    pub steepness: f64,
    pub potential: PotentialPreset,
    pub nonlinearity: NonlinearityPreset,
    pub p: f64,
    /// Exponent in `(W2)`; `None` means `nu = p`.
    pub nu: Option<f64>,
    pub eps: f64,
    pub xi_scale: f64,
    pub delta: f64,
    pub grid_n: usize,
    pub domain: f64,
    pub sobolev_trials: usize,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            vanishing: (0.0, 0.5),
            kernel: (-0.25, 0.75),
            k: 0.9,
            steepness: 0.0025,
            potential: PotentialPreset::Well,
            nonlinearity: NonlinearityPreset::Power,
            p: 1.5,
            nu: None,
            eps: 0.0,
            xi_scale: 1.0,
            delta: 1.0,
            grid_n: 4096,
            domain: 32.0,
            sobolev_trials: 200,
            seed: 7,
        }
    }
}

impl ScenarioParams {
    pub fn dim(&self) -> usize {
        match self.potential {
            PotentialPreset::Rotated { .. } => 2,
            _ => 1,
        }
    }
}

/// Problem data without `lambda`.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub params: ScenarioParams,
    pub order: FracOrder<T>,
    pub grid: Grid<T>,
    pub potential: PotentialMatrix<T>,
    pub nonlinearity: Nonlinearity<T>,
}

impl<T: Real> Scenario<T> {
    pub fn build(params: ScenarioParams) -> Result<Self> {
        let order = FracOrder::new(T::lit(params.alpha))?;
        let grid = Grid::centered(params.grid_n, T::lit(params.domain))?;
        let interval = |(a, b): (f64, f64)| Interval::new(T::lit(a), T::lit(b));
        let (i, j) = (interval(params.vanishing)?, interval(params.kernel)?);
        let (k, steep) = (T::lit(params.k), T::lit(params.steepness));
        let potential = match params.potential {
            PotentialPreset::Well => PotentialMatrix::well(1, i, j, k, steep)?,
            PotentialPreset::Envelope => PotentialMatrix::envelope(1, i, j, k, steep)?,
            PotentialPreset::Rotated { angle } => PotentialMatrix::rotated(i, j, k, steep, T::lit(angle))?,
            PotentialPreset::Zero => PotentialMatrix::zero(1, i, j, k)?,
        };
        let p = T::lit(params.p);
        let mut nonlinearity = match params.nonlinearity {
            NonlinearityPreset::Power => Nonlinearity::power(p, T::zero(), T::lit(params.xi_scale), T::lit(params.delta), i)?,
            NonlinearityPreset::PowerRegularized => {
                if !(params.eps > 0.0) {
                    return Err(Error::Parameter { name: "eps", reason: "power-regularized needs eps > 0".into() });
                }
                Nonlinearity::power(p, T::lit(params.eps), T::lit(params.xi_scale), T::lit(params.delta), i)?
            }
            NonlinearityPreset::Zero => Nonlinearity::zero(p)?,
        };
        if let Some(nu) = params.nu {
            let nu = T::lit(nu);
            if !(nu > T::one() && nu < T::lit(2.0)) {
                return Err(Error::Parameter { name: "nu", reason: format!("must lie in (1, 2), got {nu}") });
            }
            nonlinearity.eta = nonlinearity.eta * nonlinearity.delta.powf(p - nu);
            nonlinearity.nu = nu;
        }
        Ok(Self { params, order, grid, potential, nonlinearity })
    }

    /// The default setup on the given grid.
    pub fn default_with_grid(grid_n: usize, domain: f64) -> Result<Self> {
        Self::build(ScenarioParams { grid_n, domain, ..ScenarioParams::default() })
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    /// Estimates the embedding constants; fails if they are inadmissible.
    pub fn constants(&self) -> Result<EmbeddingConstants<T>> {
        EmbeddingConstants::estimate(self.order, &self.potential, &self.grid, self.params.sobolev_trials, self.params.seed)
    }

    pub fn problem(&self, constants: EmbeddingConstants<T>, lambda: T) -> Result<Problem<T>> {
        Problem::new(self.order, self.grid, self.potential.clone(), self.nonlinearity.clone(), lambda, constants)
    }
}
