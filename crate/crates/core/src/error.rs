use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid must have a power-of-two length >= 8, got {0}")]
    GridLength(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    GridSpacing(f64),
    #[error("signal has {got} values, expected {expected}")]
    ValueCount { expected: usize, got: usize },
    #[error("non-finite value at sample {index} (t = {t})")]
    NonFinite { index: usize, t: f64 },
    #[error("signals live on different grids or dimensions")]
    GridMismatch,
    #[error("fractional order must lie in (0, 1), got {0}")]
    Order(f64),
    #[error("order {0} is outside (1/2, 1); the Sobolev embedding is unavailable")]
    NotVariational(f64),
    #[error("imaginary residue {residue:e} exceeds tolerance (aliasing or truncation failure)")]
    ImaginaryResidue { residue: f64 },
    #[error("zero-frequency obstruction: mean {mean:e} is not negligible (rms {rms:e}); the integral symbol is singular at w = 0")]
    NonZeroMean { mean: f64, rms: f64 },
    #[error("signal does not decay at the grid ends (|u| = {edge:e} relative to the maximum)")]
    NotDecaying { edge: f64 },
    #[error("sublevel set {{l < k}} touches the grid boundary; enlarge the domain")]
    SublevelTouchesBoundary,
    #[error("number of trials must be positive")]
    ZeroTrials,
    #[error("invalid interval ({start}, {end})")]
    Interval { start: f64, end: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("embedding constants inadmissible: C_alpha^2 |{{l<k}}| = {product} >= 1")]
    Inadmissible { product: f64 },
    #[error("lambda = {lambda} is below the threshold Lambda = {threshold}")]
    BelowThreshold { lambda: f64, threshold: f64 },
    #[error("nonlinearity produced a non-finite value at t = {t}")]
    NonFiniteEnergy { t: f64 },
    #[error("no negative-energy scale found down to s = {floor:e}: (W2) violated numerically")]
    WitnessNotFound { floor: f64 },
    #[error("energy {energy:e} fell below the certified floor {floor:e}; the gradient is inconsistent")]
    Divergence { energy: f64, floor: f64 },
    #[error("Dirichlet problem requires the vanishing interval to be (0, T), got ({start}, {end})")]
    NotNormalized { start: f64, end: f64 },
    #[error("sweep needs at least 3 ascending lambda values")]
    SweepLadder,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
