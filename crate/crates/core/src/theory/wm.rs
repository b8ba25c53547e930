//! Monte-Carlo estimate of `E ||H||_inf` for the Rademacher sum
//! `H = m^{-1/2} sum_j eps_j A_j`, which bounds the width term `W_m` of the
//! small-ball argument.

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::measurement::{sample_ensemble, EnsembleSource};
use crate::rng;

use super::cone::kappa;

/// Constant in the operator-norm bound `E ||H||_inf <= C sqrt(n ln(2n))`.
pub const OPERATOR_NORM_CONSTANT: f64 = 3.1049;

#[derive(Clone, Debug, PartialEq)]
pub struct WmEstimate {
    pub dim: usize,
    pub m: usize,
    pub trials: usize,
    /// Sample mean of `||H||_inf`.
    pub mean_h_norm: f64,
    pub standard_error: f64,
    /// `3.1049 sqrt(n ln 2n)`.
    pub operator_bound: f64,
    /// `mean <= operator_bound + 2 standard errors`.
    pub within_bound: bool,
    /// `sqrt(1 + (1+1/rho)^2) sqrt(r) E ||H||_inf`, the bound on `W_m`.
    pub width_bound: f64,
    /// Per-trial `||H||_inf` in trial order.
    pub samples: Vec<f64>,
}

/// One draw of `H`: a fresh ensemble and fresh Rademacher signs.
pub fn rademacher_sum(source: EnsembleSource<'_>, m: usize, seed: u64) -> Result<HermitianMatrix> {
    let e = sample_ensemble(source, m, rng::derive_seed(seed, &[0]))?;
    let mut r = rng::seeded(rng::derive_seed(seed, &[1]));
    let scale = 1.0 / (m as f64).sqrt();
    let signs: Vec<f64> = (0..m)
        .map(|_| if r.random::<bool>() { scale } else { -scale })
        .collect();
    e.adjoint(&signs)
}

pub fn wm_estimate(
    source: EnsembleSource<'_>,
    m: usize,
    trials: usize,
    seed: u64,
    r: usize,
    rho: f64,
) -> Result<WmEstimate> {
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let n = match source {
        EnsembleSource::Design(d) => d.dim(),
        EnsembleSource::Sphere(n) => n,
    };
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            rademacher_sum(source, m, rng::derive_seed(seed, &[t as u64]))
                .map(|h| h.norm(SchattenNorm::Operator))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let standard_error = if trials > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    let nf = n as f64;
    let operator_bound = OPERATOR_NORM_CONSTANT * (nf * (2.0 * nf).ln()).sqrt();
    Ok(WmEstimate {
        dim: n,
        m,
        trials,
        mean_h_norm: mean,
        standard_error,
        operator_bound,
        within_bound: mean <= operator_bound + 2.0 * standard_error,
        width_bound: kappa(rho) * (r as f64).sqrt() * mean,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::stabilizer_design;

    #[test]
    fn single_measurement_norm_is_scaling() {
        let d = stabilizer_design(2).unwrap();
        let est = wm_estimate(EnsembleSource::Design(&d), 1, 20, 3, 1, 0.5).unwrap();
        for s in &est.samples {
            assert!((s - 20f64.sqrt()).abs() < 1e-12);
        }
        assert!(est.standard_error < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let a = wm_estimate(EnsembleSource::Sphere(4), 10, 30, 9, 1, 0.5).unwrap();
        let b = wm_estimate(EnsembleSource::Sphere(4), 10, 30, 9, 1, 0.5).unwrap();
        assert_eq!(a, b);
    }
}
