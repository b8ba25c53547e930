//! The Paley-Zygmund variant
//! `P(W > theta E W) >= (1-theta)^{p/(p-1)} (E W)^{p/(p-1)} / (E W^p)^{1/(p-1)}`
//! evaluated exactly on finite distributions.

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

use super::moments::measurement_values;
use super::BoundCheck;

/// A nonnegative random variable with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::param("distribution needs matching, non-empty values and weights"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::param("values must be finite and nonnegative"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::param("weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { values, weights })
    }

    /// `W = |tr(A Z)|^2` with `A` drawn from the design.
    pub fn from_design(d: &Design, z: &HermitianMatrix) -> Result<Self> {
        let values = measurement_values(d, z)?.iter().map(|v| v * v).collect();
        Self::new(values, d.weights().to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn moment(&self, p: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.powf(p))
            .sum()
    }

    pub fn tail(&self, level: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .filter(|(v, _)| **v > level)
            .map(|(_, w)| w)
            .sum()
    }
}

pub fn paley_zygmund_check(dist: &FiniteDistribution, p: f64, theta: f64) -> Result<BoundCheck> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param(format!("exponent p must exceed 1, got {p}")));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param(format!("theta must lie in [0, 1], got {theta}")));
    }
    let mean = dist.moment(1.0);
    let lhs = dist.tail(theta * mean);
    let rhs = if mean == 0.0 {
        0.0
    } else {
        let e = p / (p - 1.0);
        (1.0 - theta).powf(e) * mean.powf(e) / dist.moment(p).powf(1.0 / (p - 1.0))
    };
    Ok(BoundCheck::lower(lhs, rhs, 1e-12))
}
