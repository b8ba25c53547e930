//! Exact design moments of `tr(A Z)` with `A = sqrt(n(n+1)) w w*`.

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::hermitian::{sym3_trace, HermitianMatrix};
use crate::measurement::measurement_scaling;

use super::cone::{kappa, ConeSample};
use super::BoundCheck;

/// Values `sqrt(n(n+1)) w_i* Z w_i` for every design vector.
pub fn measurement_values(d: &Design, z: &HermitianMatrix) -> Result<Vec<f64>> {
    if z.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: z.dim(),
        });
    }
    let s = measurement_scaling(d.dim());
    Ok(d.unit_vectors().iter().map(|w| s * z.quadratic_form(w)).collect())
}

/// `sum_i p_i |sqrt(n(n+1)) w_i* Z w_i|^order`.
pub fn exact_moment(d: &Design, z: &HermitianMatrix, order: u32) -> Result<f64> {
    if order == 0 {
        return Err(Error::param("moment order must be positive"));
    }
    let values = measurement_values(d, z)?;
    Ok(values
        .iter()
        .zip(d.weights())
        .map(|(v, p)| p * v.abs().powi(order as i32))
        .sum())
}

/// `tr(Z)^2 + tr(Z^2)`, the second moment under any exact 2-design.
pub fn second_moment_identity(z: &HermitianMatrix) -> f64 {
    z.trace().powi(2) + z.frobenius_norm().powi(2)
}

/// `6 sqrt(1+(1+1/rho)^2) sqrt(r) max(1, tr(Z)^2)`.
pub fn third_moment_bound(z: &HermitianMatrix, r: usize, rho: f64) -> f64 {
    6.0 * kappa(rho) * (r as f64).sqrt() * z.trace().powi(2).max(1.0)
}

pub fn third_moment_bound_check(d: &Design, sample: &ConeSample) -> Result<BoundCheck> {
    let moment = exact_moment(d, &sample.matrix, 3)?;
    let bound = third_moment_bound(&sample.matrix, sample.rank_param, sample.rho);
    Ok(BoundCheck::upper(moment, bound, 1e-9))
}

/// `sum_i p_i (tr(A_i Z))^2 tr(A_i |Z|)` by direct enumeration.
pub fn mixed_third_moment_direct(d: &Design, z: &HermitianMatrix) -> Result<f64> {
    let plain = measurement_values(d, z)?;
    let abs = measurement_values(d, &z.abs())?;
    Ok(plain
        .iter()
        .zip(&abs)
        .zip(d.weights())
        .map(|((a, b), p)| p * a * a * b)
        .sum())
}

/// The same quantity for an exact 3-design through the symmetrizer trace:
/// `6 sqrt(n(n+1))/(n+2) tr(P_sym3 (Z ⊗ Z ⊗ |Z|))`.
pub fn mixed_third_moment_sym3(z: &HermitianMatrix) -> Result<f64> {
    let n = z.dim() as f64;
    let abs = z.abs();
    Ok(6.0 * (n * (n + 1.0)).sqrt() / (n + 2.0) * sym3_trace(z, z, &abs)?)
}
