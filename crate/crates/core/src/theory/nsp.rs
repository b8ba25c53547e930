//! Falsification harness for the Frobenius-robust rank null space property
//! `||Z_r||_F <= (rho/sqrt r) ||Z_c||_* + tau ||A(Z)||_q`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::measurement::{MeasurementEnsemble, NormExponent};
use crate::rng;

use super::cone::{cone_samples, ConeSampler};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NspVerdict {
    /// `||Z_r||_F`.
    pub lhs: f64,
    /// `(rho/sqrt r) ||Z_c||_* + tau ||A(Z)||_q`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NspWitness {
    pub rho: f64,
    pub tau: f64,
    pub order: usize,
    pub q: NormExponent,
    pub verdicts: Vec<NspVerdict>,
}

impl NspWitness {
    pub fn violations(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.holds).count()
    }
}

pub fn nsp_verdict(
    e: &MeasurementEnsemble,
    z: &HermitianMatrix,
    rho: f64,
    tau: f64,
    r: usize,
    q: NormExponent,
) -> Result<NspVerdict> {
    let (head, tail) = z.rank_split(r)?;
    let lhs = head.frobenius_norm();
    let rhs = rho / (r as f64).sqrt() * tail.norm(SchattenNorm::Nuclear) + tau * q.norm(&e.apply(z)?);
    Ok(NspVerdict {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-12) + 1e-12,
    })
}

pub fn nsp_check(
    e: &MeasurementEnsemble,
    rho: f64,
    tau: f64,
    r: usize,
    q: NormExponent,
    samples: &[HermitianMatrix],
) -> Result<NspWitness> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::param(format!("tau must be positive, got {tau}")));
    }
    let verdicts = samples
        .iter()
        .map(|z| nsp_verdict(e, z, rho, tau, r, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(NspWitness {
        rho,
        tau,
        order: r,
        q,
        verdicts,
    })
}

/// `tau = c_q / sigma_min(A)` with `c_1 = c_2 = 1`, `c_inf = sqrt(m)`: since
/// `||Z_r||_F <= ||Z||_F <= ||A(Z)||_2 / sigma_min`, this `tau` makes the
/// inequality hold for every `Z` whenever `A` is injective.
pub fn injectivity_tau(e: &MeasurementEnsemble, q: NormExponent) -> Result<f64> {
    let s = e.singular_values();
    let top = s.first().copied().unwrap_or(0.0);
    let bottom = s.last().copied().unwrap_or(0.0);
    if !(bottom > 1e-10 * top.max(1.0)) {
        return Err(Error::param(format!(
            "measurement operator is not injective (smallest singular value {bottom:e}); \
             no finite injectivity tau exists, supply tau or use more measurements"
        )));
    }
    let c = match q {
        NormExponent::One | NormExponent::Two => 1.0,
        NormExponent::Inf => (e.count() as f64).sqrt(),
    };
    Ok(c / bottom)
}

/// Half cone samples, half unit-Frobenius random Hermitian matrices.
pub fn nsp_test_matrices(n: usize, r: usize, rho: f64, count: usize, seed: u64) -> Result<Vec<HermitianMatrix>> {
    ConeSampler::new(n, r, rho)?;
    let cone = count / 2;
    let mut out: Vec<HermitianMatrix> = cone_samples(n, r, rho, cone, rng::derive_seed(seed, &[0]))?
        .into_iter()
        .map(|s| s.matrix)
        .collect();
    let mut g = rng::seeded(rng::derive_seed(seed, &[1]));
    for _ in cone..count {
        let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(&mut g)).collect();
        let z = HermitianMatrix::symmetrized(n, data);
        out.push(z.scaled(1.0 / z.frobenius_norm()));
    }
    Ok(out)
}
