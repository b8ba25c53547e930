//! Dense complex Hermitian matrices and their spectral calculus.
//!
//! [`HermitianMatrix`] is the value type used for the unknown `X`, for
//! feasible directions `Z`, and for every moment operator in the crate. All
//! norms, rank splits and proximal maps go through the cyclic Jacobi
//! eigensolver in [`eig`].

mod eig;
pub mod io;
mod symmetrizer;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::dense::{self, ZERO};
use crate::error::{Error, Result};

pub use eig::{eig_hermitian, SpectralDecomposition};
pub use symmetrizer::{
    binomial, kron3, sym3_trace, sym_projector, ProjectorKind, SymmetrizerProjector,
    DENSE_SYMMETRIZER_BUDGET,
};

/// Maximum per-entry deviation `|Z_ij - conj(Z_ji)|` accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchattenNorm {
    Frobenius,
    Nuclear,
    Operator,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major entries, rejecting non-Hermitian input.
    ///
    /// Entries that pass the tolerance check are stored exactly Hermitian
    /// (the strict upper triangle is mirrored and the diagonal made real).
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param(format!("non-finite entry {bad}")));
        }
        let (max_asymmetry, row, col) = asymmetry(dim, &data);
        if max_asymmetry > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                max_asymmetry,
                row,
                col,
            });
        }
        Ok(Self::symmetrized(dim, data))
    }

    /// Projects arbitrary entries onto the Hermitian matrices: `(A + A*) / 2`.
    pub fn symmetrized(dim: usize, mut data: Vec<Complex64>) -> Self {
        for i in 0..dim {
            data[i * dim + i].im = 0.0;
            for j in (i + 1)..dim {
                let avg = 0.5 * (data[i * dim + j] + data[j * dim + i].conj());
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(*d, 0.0);
        }
        m
    }

    /// The rank-one matrix `v v*`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = v[i] * v[j].conj();
            }
        }
        Self::symmetrized(n, data)
    }

    /// `sum_k eigenvalues[k] * u_k u_k*` for the given eigenvector columns.
    pub fn from_spectrum(eigenvalues: &[f64], columns: &[Vec<Complex64>]) -> Self {
        assert_eq!(eigenvalues.len(), columns.len());
        let n = columns.first().map_or(0, Vec::len);
        let mut data = vec![ZERO; n * n];
        for (lambda, u) in eigenvalues.iter().zip(columns) {
            if *lambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = u[i] * *lambda;
                for j in 0..n {
                    data[i * n + j] += ui * u[j].conj();
                }
            }
        }
        Self::symmetrized(n, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// Largest `|Z_ij - conj(Z_ji)|`; zero for any value of this type.
    pub fn max_asymmetry(&self) -> f64 {
        asymmetry(self.dim, &self.data).0
    }

    /// `v* Z v`, which is real for Hermitian `Z`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row: Complex64 = self.data[i * n..(i + 1) * n]
                .iter()
                .zip(v)
                .map(|(z, x)| z * x)
                .sum();
            acc += (v[i].conj() * row).re;
        }
        acc
    }

    /// Real Hilbert-Schmidt inner product `tr(self * other)`.
    pub fn frobenius_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eig(&self) -> SpectralDecomposition {
        eig_hermitian(self)
    }

    pub fn norm(&self, which: SchattenNorm) -> f64 {
        schatten_norm(self, which)
    }

    /// Spectral absolute value `|Z| = U |diag(lambda)| U*`.
    pub fn abs(&self) -> Self {
        let eig = self.eig();
        let mags: Vec<f64> = eig.eigenvalues().iter().map(|l| l.abs()).collect();
        Self::from_spectrum(&mags, &eig.columns())
    }

    /// Matrix product `self * other`, generally not Hermitian.
    pub fn matmul(&self, other: &Self) -> Vec<Complex64> {
        assert_eq!(self.dim, other.dim);
        dense::matmul(self.dim, &self.data, &other.data)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in Hermitian arithmetic");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Best rank-`r` spectral truncation and its complement.
    pub fn rank_split(&self, r: usize) -> Result<(Self, Self)> {
        rank_split(self, r)
    }

    pub fn svt(&self, tau: f64) -> Result<Self> {
        svt(self, tau)
    }
}

fn asymmetry(dim: usize, data: &[Complex64]) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for i in 0..dim {
        for j in i..dim {
            let d = (data[i * dim + j] - data[j * dim + i].conj()).norm();
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    worst
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scaled(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scaled(-1.0)
    }
}

/// Splits `z` into `(z_r, z_c)` with `z_r` the `r` eigenvalues of largest
/// magnitude. Ties go to the eigenvalue that comes first in the stable
/// magnitude ordering of [`eig_hermitian`].
pub fn rank_split(z: &HermitianMatrix, r: usize) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let n = z.dim();
    if r == 0 || r > n {
        return Err(Error::param(format!("rank split order {r} outside 1..={n}")));
    }
    let eig = z.eig();
    let cols = eig.columns();
    let head = HermitianMatrix::from_spectrum(&eig.eigenvalues()[..r], &cols[..r]);
    let tail = z - &head;
    Ok((head, tail))
}

pub fn schatten_norm(z: &HermitianMatrix, which: SchattenNorm) -> f64 {
    match which {
        SchattenNorm::Frobenius => z.frobenius_norm(),
        SchattenNorm::Nuclear => z.eig().eigenvalues().iter().map(|l| l.abs()).sum(),
        SchattenNorm::Operator => z.eig().eigenvalues().first().map_or(0.0, |l| l.abs()),
    }
}

/// Soft-thresholds a real eigenvalue.
pub fn shrink(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

/// Proximal map of `tau * ||.||_*` on Hermitian matrices.
pub fn svt(z: &HermitianMatrix, tau: f64) -> Result<HermitianMatrix> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::param(format!("threshold must be finite and >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(z.clone());
    }
    let eig = z.eig();
    let shrunk: Vec<f64> = eig.eigenvalues().iter().map(|l| shrink(*l, tau)).collect();
    Ok(HermitianMatrix::from_spectrum(&shrunk, &eig.columns()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    pub(crate) fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
        let mut r = rng::seeded(seed);
        let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(&mut r)).collect();
        HermitianMatrix::symmetrized(n, data)
    }

    fn diag_of(m: &HermitianMatrix) -> Vec<f64> {
        (0..m.dim()).map(|i| m.get(i, i).re).collect()
    }

    fn assert_close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) {
        let d = (a - b).frobenius_norm();
        assert!(d <= tol, "matrices differ by {d:e}");
    }

    #[test]
    fn rejects_non_hermitian() {
        let data = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.5, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        match HermitianMatrix::new(2, data) {
            Err(Error::NotHermitian { max_asymmetry, .. }) => {
                assert!((max_asymmetry - 0.5).abs() < 1e-15)
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn rejects_complex_diagonal() {
        let data = vec![Complex64::new(1.0, 1e-6)];
        assert!(matches!(
            HermitianMatrix::new(1, data),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rank_split_diagonal() {
        let z = HermitianMatrix::from_real_diagonal(&[5.0, 3.0, 1.0]);
        let (head, tail) = z.rank_split(2).unwrap();
        assert_close(&head, &HermitianMatrix::from_real_diagonal(&[5.0, 3.0, 0.0]), 1e-12);
        assert_close(&tail, &HermitianMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]), 1e-12);
    }

    #[test]
    fn rank_split_keeps_largest_magnitude() {
        let z = HermitianMatrix::from_real_diagonal(&[-4.0, 2.0]);
        let (head, _) = z.rank_split(1).unwrap();
        assert_eq!(diag_of(&head), vec![-4.0, 0.0]);
    }

    #[test]
    fn rank_split_of_rank_two_has_empty_tail() {
        let mut r = rng::seeded(11);
        let u = rng::haar_unitary_columns(&mut r, 5);
        let z = HermitianMatrix::from_spectrum(&[1.7, -0.6], &u[..2]);
        let (head, tail) = z.rank_split(2).unwrap();
        assert!(tail.frobenius_norm() <= 1e-10);
        assert_close(&head, &z, 1e-10);
    }

    #[test]
    fn rank_split_out_of_range() {
        let z = HermitianMatrix::identity(3);
        assert!(matches!(z.rank_split(0), Err(Error::Parameter(_))));
        assert!(matches!(z.rank_split(4), Err(Error::Parameter(_))));
    }

    #[test]
    fn schatten_norms_of_diagonal() {
        let z = HermitianMatrix::from_real_diagonal(&[2.0, -3.0]);
        assert!((z.norm(SchattenNorm::Nuclear) - 5.0).abs() < 1e-12);
        assert!((z.norm(SchattenNorm::Operator) - 3.0).abs() < 1e-12);
        assert!((z.norm(SchattenNorm::Frobenius) - 13f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn svt_diagonal() {
        let z = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, -2.0]);
        let s = z.svt(1.5).unwrap();
        assert_close(&s, &HermitianMatrix::from_real_diagonal(&[1.5, 0.0, -0.5]), 1e-12);
    }

    #[test]
    fn svt_zero_threshold_is_identity() {
        let z = random_hermitian(5, 6);
        assert_eq!(z.svt(0.0).unwrap(), z);
    }

    #[test]
    fn svt_above_operator_norm_vanishes() {
        let z = random_hermitian(6, 6);
        let tau = z.norm(SchattenNorm::Operator);
        assert!(z.svt(tau).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn svt_rejects_negative_threshold() {
        let z = HermitianMatrix::identity(2);
        assert!(matches!(z.svt(-0.1), Err(Error::Parameter(_))));
        assert!(matches!(z.svt(f64::NAN), Err(Error::Parameter(_))));
    }

    #[test]
    fn abs_squares_to_square() {
        let z = random_hermitian(12, 5);
        let a = z.abs();
        let lhs = HermitianMatrix::symmetrized(5, a.matmul(&a));
        let rhs = HermitianMatrix::symmetrized(5, z.matmul(&z));
        assert_close(&lhs, &rhs, 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_ordering(seed in any::<u64>(), n in 1usize..8) {
            let z = random_hermitian(seed, n);
            let nuc = z.norm(SchattenNorm::Nuclear);
            let fro = z.norm(SchattenNorm::Frobenius);
            let op = z.norm(SchattenNorm::Operator);
            prop_assert!(nuc + 1e-10 >= fro);
            prop_assert!(fro + 1e-10 >= op);
            // Frobenius from entries agrees with the spectral definition.
            let spectral: f64 = z.eig().eigenvalues().iter().map(|l| l * l).sum::<f64>().sqrt();
            prop_assert!((spectral - fro).abs() <= 1e-10 * fro.max(1.0));
        }

        #[test]
        fn rank_split_norm_monotonicity(seed in any::<u64>(), n in 1usize..8, r_frac in 0.0f64..1.0) {
            let z = random_hermitian(seed, n);
            let r = 1 + ((n as f64 - 1.0) * r_frac) as usize;
            let (head, tail) = z.rank_split(r).unwrap();
            prop_assert!(z.norm(SchattenNorm::Nuclear) + 1e-10 >= head.norm(SchattenNorm::Nuclear));
            prop_assert!(head.frobenius_norm() <= z.frobenius_norm() + 1e-10);
            let recombined = &head + &tail;
            let err = (&recombined - &z).frobenius_norm();
            prop_assert!(err <= 1e-12 * z.frobenius_norm().max(1.0));
            // retained eigenvalues dominate discarded ones
            let kept = head.eig();
            let dropped = tail.eig();
            let min_kept = kept.eigenvalues()[..r].iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
            let max_dropped = dropped.eigenvalues().first().map_or(0.0, |l| l.abs());
            prop_assert!(min_kept + 1e-9 >= max_dropped);
        }

        #[test]
        fn svt_is_nonexpansive(seed in any::<u64>(), n in 1usize..7, tau in 0.0f64..2.0) {
            let a = random_hermitian(seed, n);
            let b = random_hermitian(seed.wrapping_add(1), n);
            let lhs = (&a.svt(tau).unwrap() - &b.svt(tau).unwrap()).frobenius_norm();
            prop_assert!(lhs <= (&a - &b).frobenius_norm() + 1e-10);
        }
    }
}
