//! Projector onto the totally symmetric subspace of `(C^n)^{⊗t}` and the
//! closed-form trace `tr(P_sym3 (X ⊗ Y ⊗ Z))`.
//!
//! Tensor indices are row-major: the multi-index `(i_1, ..., i_t)` maps to
//! `i_1 n^{t-1} + ... + i_t`.

use num_complex::Complex64;

use super::HermitianMatrix;
use crate::dense;
use crate::error::{Error, Result};

/// Largest `n^t` for which a dense projector matrix is materialized.
pub const DENSE_SYMMETRIZER_BUDGET: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    Dense,
    MatrixFree,
}

#[derive(Clone, Debug)]
pub struct SymmetrizerProjector {
    base_dim: usize,
    tensor_power: usize,
    permutations: Vec<Vec<usize>>,
    /// Dense `n^t x n^t` real matrix; `None` for the matrix-free applicator.
    dense: Option<Vec<f64>>,
}

/// `binom(n, k)` as a float; exact for every size used in this crate.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn sym_projector(n: usize, t: usize, kind: ProjectorKind) -> Result<SymmetrizerProjector> {
    match kind {
        ProjectorKind::Dense => SymmetrizerProjector::dense(n, t),
        ProjectorKind::MatrixFree => SymmetrizerProjector::matrix_free(n, t),
    }
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for smaller in permutations(t - 1) {
        for pos in 0..t {
            let mut p = smaller.clone();
            p.insert(pos, t - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

impl SymmetrizerProjector {
    pub fn matrix_free(n: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("base dimension must be positive"));
        }
        if !(1..=4).contains(&t) {
            return Err(Error::param(format!("tensor power {t} outside 1..=4")));
        }
        Ok(Self {
            base_dim: n,
            tensor_power: t,
            permutations: permutations(t),
            dense: None,
        })
    }

    pub fn dense(n: usize, t: usize) -> Result<Self> {
        let mut p = Self::matrix_free(n, t)?;
        let size = p.space_dim();
        if size > DENSE_SYMMETRIZER_BUDGET {
            return Err(Error::Capacity(format!(
                "dense symmetrizer for n={n}, t={t} needs {size} rows (budget {DENSE_SYMMETRIZER_BUDGET}); use the matrix-free projector"
            )));
        }
        let weight = 1.0 / p.permutations.len() as f64;
        let mut m = vec![0.0; size * size];
        for row in 0..size {
            for perm in &p.permutations {
                m[row * size + p.permute_index(row, perm)] += weight;
            }
        }
        p.dense = Some(m);
        Ok(p)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn tensor_power(&self) -> usize {
        self.tensor_power
    }

    /// `n^t`.
    pub fn space_dim(&self) -> usize {
        self.base_dim.pow(self.tensor_power as u32)
    }

    /// `binom(n + t - 1, t)`, the rank of the projector.
    pub fn symmetric_dim(&self) -> f64 {
        binomial(self.base_dim + self.tensor_power - 1, self.tensor_power)
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    pub fn dense_matrix(&self) -> Option<&[f64]> {
        self.dense.as_deref()
    }

    fn digits(&self, mut index: usize) -> [usize; 4] {
        let mut d = [0; 4];
        for slot in (0..self.tensor_power).rev() {
            d[slot] = index % self.base_dim;
            index /= self.base_dim;
        }
        d
    }

    fn permute_index(&self, index: usize, perm: &[usize]) -> usize {
        let d = self.digits(index);
        perm.iter().fold(0, |acc, &src| acc * self.base_dim + d[src])
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let size = self.space_dim();
        assert_eq!(v.len(), size, "vector length must be n^t");
        if let Some(m) = &self.dense {
            return (0..size)
                .map(|i| {
                    m[i * size..(i + 1) * size]
                        .iter()
                        .zip(v)
                        .filter(|(p, _)| **p != 0.0)
                        .map(|(p, x)| x * *p)
                        .sum()
                })
                .collect();
        }
        let weight = 1.0 / self.permutations.len() as f64;
        (0..size)
            .map(|i| {
                let acc: Complex64 = self
                    .permutations
                    .iter()
                    .map(|perm| v[self.permute_index(i, perm)])
                    .sum();
                acc * weight
            })
            .collect()
    }

    /// Trace computed from the representation itself (diagonal sum for the
    /// dense matrix, fixed-point counting for the matrix-free applicator).
    pub fn trace(&self) -> f64 {
        let size = self.space_dim();
        if let Some(m) = &self.dense {
            return (0..size).map(|i| m[i * size + i]).sum();
        }
        let fixed: usize = (0..size)
            .map(|i| {
                self.permutations
                    .iter()
                    .filter(|perm| self.permute_index(i, perm) == i)
                    .count()
            })
            .sum();
        fixed as f64 / self.permutations.len() as f64
    }
}

/// `tr(P_sym3 (X ⊗ Y ⊗ Z))` via the six-term trace identity.
pub fn sym3_trace(x: &HermitianMatrix, y: &HermitianMatrix, z: &HermitianMatrix) -> Result<f64> {
    let n = x.dim();
    for m in [y, z] {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
    }
    let (tx, ty, tz) = (x.trace(), y.trace(), z.trace());
    let tr2 = |a: &HermitianMatrix, b: &HermitianMatrix| {
        dense::trace_of_product(n, a.entries(), b.entries()).re
    };
    let xy = x.matmul(y);
    let xz = x.matmul(z);
    let xyz = dense::trace_of_product(n, &xy, z.entries());
    let xzy = dense::trace_of_product(n, &xz, y.entries());
    let six = tx * ty * tz + tx * tr2(y, z) + ty * tr2(x, z) + tz * tr2(x, y) + (xyz + xzy).re;
    Ok(six / 6.0)
}

/// Dense `X ⊗ Y ⊗ Z`; exposed for oracles and small-scale inspection.
pub fn kron3(x: &HermitianMatrix, y: &HermitianMatrix, z: &HermitianMatrix) -> Vec<Complex64> {
    let n = x.dim();
    let xy = dense::kron(x.entries(), n, y.entries(), n);
    dense::kron(&xy, n * n, z.entries(), n)
}
