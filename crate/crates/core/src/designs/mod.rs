//! Weighted complex projective designs.
//!
//! A [`Design`] is a finite set of vectors `w_i` with probabilities `p_i`.
//! Vectors are stored either unit-normalized or super-normalized (scaled by
//! `(n(n+1))^{1/4}` so that `w w*` already carries the measurement scaling).
//! Certification of how well a design reproduces Haar moments lives in
//! [`accuracy`]; exact 3-designs come from [`stabilizer_design`].

pub mod accuracy;
pub mod io;
mod stabilizer;

use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::rng::{self, Rng};

pub use accuracy::{
    certify, design_accuracy, AccuracyMethod, AccuracyNorm, DesignCertificate,
    PowerIterationSettings, DENSE_ACCURACY_BUDGET, MAX_TENSOR_POWER,
};
pub use io::{load_design, read_design, save_design, write_design};
pub use stabilizer::{stabilizer_design, stabilizer_state_count, MAX_STABILIZER_QUBITS};

/// Per-vector tolerance on the stored norm.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Tolerance on `|sum p_i - 1|`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    Unit,
    SuperNormalized,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Unit => "unit",
            Normalization::SuperNormalized => "super_normalized",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Normalization::Unit),
            "super_normalized" => Ok(Normalization::SuperNormalized),
            other => Err(Error::param(format!("unknown normalization `{other}`"))),
        }
    }
}

/// `(n(n+1))^{1/4}`.
pub fn super_normalization_factor(n: usize) -> f64 {
    ((n * (n + 1)) as f64).powf(0.25)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    normalization: Normalization,
}

impl Design {
    pub fn new(
        dim: usize,
        vectors: Vec<Vec<Complex64>>,
        weights: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("design dimension must be positive"));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidDesign {
                index: 0,
                reason: "design has no vectors".into(),
            });
        }
        if vectors.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: weights.len(),
            });
        }
        let target = match normalization {
            Normalization::Unit => 1.0,
            Normalization::SuperNormalized => super_normalization_factor(dim),
        };
        for (i, (v, p)) in vectors.iter().zip(&weights).enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidDesign {
                    index: i,
                    reason: format!("vector has length {} instead of {dim}", v.len()),
                });
            }
            let norm = dense::norm(v);
            if !((norm - target).abs() <= NORM_TOLERANCE) {
                return Err(Error::InvalidDesign {
                    index: i,
                    reason: format!("vector norm {norm} differs from {target}"),
                });
            }
            if !(*p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidDesign {
                    index: i,
                    reason: format!("weight {p} is not a probability"),
                });
            }
        }
        let total: f64 = weights.iter().sum();
        if !((total - 1.0).abs() <= WEIGHT_SUM_TOLERANCE) {
            return Err(Error::InvalidDesign {
                index: weights.len() - 1,
                reason: format!("weights sum to {total}, not 1"),
            });
        }
        Ok(Self {
            dim,
            vectors,
            weights,
            normalization,
        })
    }

    /// Unit-normalized design with equal weights.
    pub fn uniform(dim: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let w = 1.0 / vectors.len().max(1) as f64;
        let weights = vec![w; vectors.len()];
        Self::new(dim, vectors, weights, Normalization::Unit)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub(crate) fn require_unit(&self, operation: &str) -> Result<()> {
        if self.normalization != Normalization::Unit {
            return Err(Error::param(format!("{operation} requires a unit-normalized design")));
        }
        Ok(())
    }

    /// Vectors rescaled to unit norm regardless of the stored mode.
    pub fn unit_vectors(&self) -> Vec<Vec<Complex64>> {
        match self.normalization {
            Normalization::Unit => self.vectors.clone(),
            Normalization::SuperNormalized => {
                let f = 1.0 / super_normalization_factor(self.dim);
                self.vectors
                    .iter()
                    .map(|v| v.iter().map(|z| z * f).collect())
                    .collect()
            }
        }
    }

    pub fn super_normalize(&self) -> Result<Design> {
        super_normalize(self)
    }

    /// Copy with every vector nudged by `magnitude` times a random unit
    /// direction and renormalized. Weights are unchanged.
    pub fn perturbed(&self, magnitude: f64, seed: u64) -> Result<Design> {
        self.require_unit("perturbation")?;
        let mut r = rng::seeded(seed);
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let dir = rng::unit_vector(&mut r, self.dim);
                let mut w: Vec<Complex64> =
                    v.iter().zip(&dir).map(|(a, b)| a + b * magnitude).collect();
                let norm = dense::norm(&w);
                w.iter_mut().for_each(|z| *z /= norm);
                w
            })
            .collect();
        Design::new(self.dim, vectors, self.weights.clone(), Normalization::Unit)
    }
}

pub fn super_normalize(d: &Design) -> Result<Design> {
    if d.normalization == Normalization::SuperNormalized {
        return Err(Error::param("design is already super-normalized"));
    }
    let f = super_normalization_factor(d.dim);
    let vectors = d
        .vectors
        .iter()
        .map(|v| v.iter().map(|z| z * f).collect())
        .collect();
    Ok(Design {
        dim: d.dim,
        vectors,
        weights: d.weights.clone(),
        normalization: Normalization::SuperNormalized,
    })
}

/// `||sum p_i w_i w_i* - id/n||_inf` on unit-normalized vectors.
pub fn frame_check(d: &Design) -> Result<f64> {
    d.require_unit("frame check")?;
    Ok(frame_deviation(d.dim, &d.vectors, &d.weights))
}

pub(crate) fn frame_deviation(n: usize, vectors: &[Vec<Complex64>], weights: &[f64]) -> f64 {
    let mut frame = vec![dense::ZERO; n * n];
    for (v, p) in vectors.iter().zip(weights) {
        for i in 0..n {
            let vi = v[i] * *p;
            for j in 0..n {
                frame[i * n + j] += vi * v[j].conj();
            }
        }
    }
    for i in 0..n {
        frame[i * n + i] -= Complex64::new(1.0 / n as f64, 0.0);
    }
    HermitianMatrix::symmetrized(n, frame).norm(SchattenNorm::Operator)
}

/// Infinite stream of Haar-random unit vectors in `C^n`.
pub struct SphereSampler {
    dim: usize,
    rng: Rng,
}

impl SphereSampler {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("sphere dimension must be positive"));
        }
        Ok(Self {
            dim,
            rng: rng::seeded(seed),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl Iterator for SphereSampler {
    type Item = Vec<Complex64>;
    fn next(&mut self) -> Option<Self::Item> {
        Some(rng::unit_vector(&mut self.rng, self.dim))
    }
}

pub fn sphere_sampler(n: usize, seed: u64) -> Result<SphereSampler> {
    SphereSampler::new(n, seed)
}
