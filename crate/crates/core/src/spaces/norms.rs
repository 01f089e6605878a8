use serde::Serialize;

use super::constants::EmbeddingConstants;
use super::potential::SampledPotential;
use crate::error::{Error, Result};
use crate::fracops::{seminorm_sq, FracOrder, SampledSignal};
use crate::scalar::Real;

/// `||u||_lambda^2 = |u|_alpha^2 + lambda int (L u, u) dt`.
pub fn lambda_norm_sq<T: Real>(u: &SampledSignal<T>, p: &SampledPotential<T>, lambda: T, order: FracOrder<T>) -> Result<T> {
    check_potential_grid(u, p)?;
    if !(lambda > T::zero()) {
        return Err(Error::Parameter { name: "lambda", reason: format!("must be positive, got {lambda}") });
    }
    Ok(seminorm_sq(u, order) + lambda * p.form(u, u))
}

pub fn lambda_norm<T: Real>(u: &SampledSignal<T>, p: &SampledPotential<T>, lambda: T, order: FracOrder<T>) -> Result<T> {
    lambda_norm_sq(u, p, lambda, order).map(T::sqrt)
}

/// `||u||_{X^alpha}`, the `lambda = 1` norm.
pub fn x_norm<T: Real>(u: &SampledSignal<T>, p: &SampledPotential<T>, order: FracOrder<T>) -> Result<T> {
    lambda_norm(u, p, T::one(), order)
}

pub(crate) fn check_potential_grid<T: Real>(u: &SampledSignal<T>, p: &SampledPotential<T>) -> Result<()> {
    if u.dim() == p.dim() && u.grid() == p.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// One side-by-side evaluation of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin<T> {
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
}

impl<T: Real> Margin<T> {
    fn new(lhs: T, rhs: T) -> Self {
        Self { lhs, rhs, margin: rhs - lhs }
    }

    pub fn holds(&self) -> bool {
        self.margin >= T::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport<T> {
    pub norm_lambda: T,
    /// `||u||_2^2 <= ||u||_lambda^2 / theta_0`.
    pub l2: Margin<T>,
    /// `(r, ||u||_r^r <= theta_0^{-r/2} |{l<k}|^{-(r-2)/2} ||u||_lambda^r)`.
    pub lr: Vec<(u32, Margin<T>)>,
}

impl<T: Real> EmbeddingReport<T> {
    pub fn holds(&self) -> bool {
        self.l2.holds() && self.lr.iter().all(|(_, m)| m.holds())
    }

    pub fn worst_margin(&self) -> T {
        self.lr.iter().map(|(_, m)| m.margin).fold(self.l2.margin, T::min)
    }
}

pub const EMBEDDING_EXPONENTS: [u32; 3] = [3, 4, 6];

/// Evaluates both sides of the `L^2` and `L^r` embeddings of `X_lambda`, valid for `lambda >= Lambda`.
pub fn embedding_bounds<T: Real>(
    u: &SampledSignal<T>,
    c: &EmbeddingConstants<T>,
    p: &SampledPotential<T>,
    lambda: T,
    order: FracOrder<T>,
) -> Result<EmbeddingReport<T>> {
    if lambda < c.lambda_threshold {
        return Err(Error::BelowThreshold { lambda: lambda.as_f64(), threshold: c.lambda_threshold.as_f64() });
    }
    let norm = lambda_norm(u, p, lambda, order)?;
    let l2 = u.norm_l2();
    let lr = EMBEDDING_EXPONENTS
        .iter()
        .map(|&r| {
            let rt = T::from_u32(r).expect("small exponent");
            let two = T::lit(2.0);
            let lhs = u.norm_lr(rt).powf(rt);
            let rhs = c.theta0.powf(-rt / two) * c.sublevel_measure.powf(-(rt - two) / two) * norm.powf(rt);
            (r, Margin::new(lhs, rhs))
        })
        .collect();
    Ok(EmbeddingReport { norm_lambda: norm, l2: Margin::new(l2 * l2, norm * norm / c.theta0), lr })
}
