//! Design accuracy `theta_p = binom(n+t-1, t) ||sum p_i (w_i w_i*)^{⊗t} - P_sym/binom||_p`.
//!
//! Three evaluation strategies are offered:
//!
//! - `Dense` materializes the `n^t x n^t` deviation and diagonalizes it.
//! - `SymmetricSubspace` uses that the deviation vanishes off the symmetric
//!   subspace and diagonalizes its `binom(n+t-1, t)`-dimensional compression
//!   in the occupation-number basis. Exact and much cheaper than `Dense`.
//! - `PowerIteration` applies the deviation matrix-free and only yields the
//!   operator norm.

use num_complex::Complex64;

use super::{frame_deviation, Design};
use crate::dense::{self, ZERO};
use crate::error::{Error, Result};
use crate::hermitian::{
    binomial, HermitianMatrix, SymmetrizerProjector, DENSE_SYMMETRIZER_BUDGET,
};
use crate::rng;

/// Largest supported tensor power.
pub const MAX_TENSOR_POWER: usize = 4;

/// Largest `n^t` diagonalized by the `Dense` method. Tighter than the
/// projector budget because the Jacobi sweep is cubic in `n^t`.
pub const DENSE_ACCURACY_BUDGET: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccuracyNorm {
    One,
    Inf,
}

impl std::str::FromStr for AccuracyNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" => Ok(AccuracyNorm::One),
            "inf" | "infinity" => Ok(AccuracyNorm::Inf),
            other => Err(Error::param(format!("unknown accuracy norm `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIterationSettings {
    pub max_iterations: usize,
    /// Stop once successive Rayleigh quotients agree to this relative accuracy.
    pub relative_tolerance: f64,
    /// Accuracies below this are reported as converged immediately.
    pub absolute_floor: f64,
    pub seed: u64,
}

impl Default for PowerIterationSettings {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            relative_tolerance: 1e-9,
            absolute_floor: 1e-12,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AccuracyMethod {
    Dense,
    SymmetricSubspace,
    PowerIteration(PowerIterationSettings),
}

impl AccuracyMethod {
    pub fn power_iteration() -> Self {
        AccuracyMethod::PowerIteration(PowerIterationSettings::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            AccuracyMethod::Dense => "dense",
            AccuracyMethod::SymmetricSubspace => "symmetric_subspace",
            AccuracyMethod::PowerIteration(_) => "power_iteration",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignCertificate {
    pub tensor_power: usize,
    /// Unavailable from power iteration.
    pub theta_1: Option<f64>,
    pub theta_inf: f64,
    pub frame_deviation: f64,
    pub method: AccuracyMethod,
}

pub fn design_accuracy(d: &Design, t: usize, norm: AccuracyNorm, method: AccuracyMethod) -> Result<f64> {
    check_power(t)?;
    match (method, norm) {
        (AccuracyMethod::PowerIteration(settings), AccuracyNorm::Inf) => power_theta(d, t, &settings),
        (AccuracyMethod::PowerIteration(_), AccuracyNorm::One) => Err(Error::param(
            "power iteration only certifies the operator norm; use a spectral method for theta_1",
        )),
        _ => {
            let (one, inf) = spectral_thetas(d, t, method)?;
            Ok(match norm {
                AccuracyNorm::One => one,
                AccuracyNorm::Inf => inf,
            })
        }
    }
}

pub fn certify(d: &Design, t: usize, method: AccuracyMethod) -> Result<DesignCertificate> {
    check_power(t)?;
    let (theta_1, theta_inf) = match method {
        AccuracyMethod::PowerIteration(settings) => (None, power_theta(d, t, &settings)?),
        _ => {
            let (one, inf) = spectral_thetas(d, t, method)?;
            (Some(one), inf)
        }
    };
    Ok(DesignCertificate {
        tensor_power: t,
        theta_1,
        theta_inf,
        frame_deviation: frame_deviation(d.dim(), &d.unit_vectors(), d.weights()),
        method,
    })
}

fn check_power(t: usize) -> Result<()> {
    if t == 0 || t > MAX_TENSOR_POWER {
        return Err(Error::param(format!(
            "tensor power {t} outside 1..={MAX_TENSOR_POWER}"
        )));
    }
    Ok(())
}

fn tensor_power(w: &[Complex64], t: usize) -> Vec<Complex64> {
    (1..t).fold(w.to_vec(), |acc, _| dense::kron_vec(&acc, w))
}

/// Returns `(theta_1, theta_inf)` from the full spectrum of the deviation.
fn spectral_thetas(d: &Design, t: usize, method: AccuracyMethod) -> Result<(f64, f64)> {
    let n = d.dim();
    let scale = binomial(n + t - 1, t);
    let deviation = match method {
        AccuracyMethod::Dense => dense_deviation(d, t)?,
        _ => subspace_deviation(d, t),
    };
    let eig = deviation.eig();
    let one: f64 = eig.eigenvalues().iter().map(|l| l.abs()).sum();
    let inf = eig.eigenvalues().first().map_or(0.0, |l| l.abs());
    Ok((scale * one, scale * inf))
}

fn dense_deviation(d: &Design, t: usize) -> Result<HermitianMatrix> {
    let n = d.dim();
    let size = n.checked_pow(t as u32).unwrap_or(usize::MAX);
    let budget = DENSE_ACCURACY_BUDGET.min(DENSE_SYMMETRIZER_BUDGET);
    if size > budget {
        return Err(Error::Capacity(format!(
            "dense design accuracy needs n^t = {size} > {budget}; use the subspace method or power iteration"
        )));
    }
    let proj = SymmetrizerProjector::dense(n, t)?;
    let p = proj.dense_matrix().expect("dense projector");
    let inv = 1.0 / binomial(n + t - 1, t);
    let mut data: Vec<Complex64> = p.iter().map(|x| Complex64::new(-x * inv, 0.0)).collect();
    for (w, weight) in d.unit_vectors().iter().zip(d.weights()) {
        let v = tensor_power(w, t);
        for i in 0..size {
            let vi = v[i] * *weight;
            if vi == ZERO {
                continue;
            }
            let row = &mut data[i * size..(i + 1) * size];
            for (slot, vj) in row.iter_mut().zip(&v) {
                *slot += vi * vj.conj();
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(size, data))
}

/// Non-decreasing index tuples of length `t` over `0..n`.
fn multisets(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; t];
    loop {
        out.push(current.clone());
        let mut pos = t;
        while pos > 0 && current[pos - 1] == n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        let v = current[pos - 1] + 1;
        current[pos - 1..].iter_mut().for_each(|c| *c = v);
    }
}

/// `sqrt(t! / prod m_a!)` for a sorted multiset.
fn multinomial_sqrt(m: &[usize]) -> f64 {
    let fact = |k: usize| (1..=k).product::<usize>() as f64;
    let mut denom = 1.0;
    let mut run = 1;
    for i in 1..=m.len() {
        if i < m.len() && m[i] == m[i - 1] {
            run += 1;
        } else {
            denom *= fact(run);
            run = 1;
        }
    }
    (fact(m.len()) / denom).sqrt()
}

fn subspace_deviation(d: &Design, t: usize) -> HermitianMatrix {
    let sets = multisets(d.dim(), t);
    let coeff: Vec<f64> = sets.iter().map(|m| multinomial_sqrt(m)).collect();
    let size = sets.len();
    let mut data = vec![ZERO; size * size];
    for (w, weight) in d.unit_vectors().iter().zip(d.weights()) {
        let c: Vec<Complex64> = sets
            .iter()
            .zip(&coeff)
            .map(|(m, k)| m.iter().fold(Complex64::new(*k, 0.0), |acc, &a| acc * w[a]))
            .collect();
        for i in 0..size {
            let ci = c[i] * *weight;
            for j in 0..size {
                data[i * size + j] += ci * c[j].conj();
            }
        }
    }
    let inv = 1.0 / size as f64;
    for i in 0..size {
        data[i * size + i] -= Complex64::new(inv, 0.0);
    }
    HermitianMatrix::symmetrized(size, data)
}

fn power_theta(d: &Design, t: usize, settings: &PowerIterationSettings) -> Result<f64> {
    let n = d.dim();
    let scale = binomial(n + t - 1, t);
    let proj = SymmetrizerProjector::matrix_free(n, t)?;
    let lifted: Vec<(Vec<Complex64>, f64)> = d
        .unit_vectors()
        .iter()
        .zip(d.weights())
        .map(|(w, p)| (tensor_power(w, t), *p))
        .collect();
    // Scaled deviation binom * Delta.
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let mut out: Vec<Complex64> = proj.apply(x).into_iter().map(|z| -z).collect();
        for (v, p) in &lifted {
            let c = dense::inner(v, x) * (p * scale);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += vi * c;
            }
        }
        out
    };

    let mut r = rng::seeded(settings.seed);
    let mut x = rng::unit_vector(&mut r, proj.space_dim());
    let mut previous = f64::NAN;
    for _ in 0..settings.max_iterations {
        let y = apply(&x);
        let q = dense::norm(&y);
        if q <= settings.absolute_floor {
            return Ok(q);
        }
        // ||Delta x|| for unit x converges to the top |eigenvalue| from below.
        if (q - previous).abs() <= settings.relative_tolerance * q {
            return Ok(q);
        }
        previous = q;
        let z = apply(&y);
        let nz = dense::norm(&z);
        if nz <= settings.absolute_floor * q {
            return Ok(q);
        }
        x = z.into_iter().map(|c| c / nz).collect();
    }
    Err(Error::NonConvergence {
        iterations: settings.max_iterations,
        residual: previous,
    })
}
