//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies a real Jacobi rotation to the resulting real
//! symmetric 2x2 block. Sweeps continue until the off-diagonal Frobenius mass
//! falls below `OFF_DIAGONAL_TOLERANCE` relative to the full Frobenius norm.

use num_complex::Complex64;

use super::HermitianMatrix;
use crate::dense::{ONE, ZERO};

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    /// Row-major unitary; column `k` is the eigenvector of `eigenvalues[k]`.
    vectors: Vec<Complex64>,
    sweeps: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues sorted by decreasing absolute value.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major eigenvector matrix `U`.
    pub fn unitary(&self) -> &[Complex64] {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + k]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim).map(|k| self.eigenvector(k)).collect()
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `U diag(lambda) U*`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::from_spectrum(&self.eigenvalues, &self.columns())
    }
}

pub fn eig_hermitian(z: &HermitianMatrix) -> SpectralDecomposition {
    let n = z.dim();
    let mut a = z.entries().to_vec();
    let mut u = vec![ZERO; n * n];
    for i in 0..n {
        u[i * n + i] = ONE;
    }

    let total: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let threshold = OFF_DIAGONAL_TOLERANCE * OFF_DIAGONAL_TOLERANCE * total;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off = off_diagonal_mass(n, &a);
        if off == 0.0 || off <= threshold {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(n, &mut a, &mut u, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    // stable: equal magnitudes keep their index order
    order.sort_by(|&i, &j| diag[j].abs().total_cmp(&diag[i].abs()));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![ZERO; n * n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + k] = u[i * n + src];
        }
    }
    SpectralDecomposition {
        dim: n,
        eigenvalues,
        vectors,
        sweeps,
    }
}

fn off_diagonal_mass(n: usize, a: &[Complex64]) -> f64 {
    let mut off = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            off += 2.0 * a[i * n + j].norm_sqr();
        }
    }
    off
}

/// Annihilates `a[p][q]` with the unitary `V = diag(1, e^{-i phi}) R(c, s)`
/// acting on coordinates `p, q`, updating `a <- V* a V` and `u <- u V`.
fn rotate(n: usize, a: &mut [Complex64], u: &mut [Complex64], p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r <= f64::MIN_POSITIVE {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = (apq / r).conj();

    let v_pp = Complex64::new(c, 0.0);
    let v_pq = Complex64::new(s, 0.0);
    let v_qp = -phase_conj * s;
    let v_qq = phase_conj * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = akp * v_pp + akq * v_qp;
        let new_kq = akp * v_pq + akq * v_qq;
        a[k * n + p] = new_kp;
        a[k * n + q] = new_kq;
        a[p * n + k] = new_kp.conj();
        a[q * n + k] = new_kq.conj();
    }
    a[p * n + p] = Complex64::new(app - t * r, 0.0);
    a[q * n + q] = Complex64::new(aqq + t * r, 0.0);
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;

    for k in 0..n {
        let ukp = u[k * n + p];
        let ukq = u[k * n + q];
        u[k * n + p] = ukp * v_pp + ukq * v_qp;
        u[k * n + q] = ukp * v_pq + ukq * v_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::rng;

    fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
        let mut r = rng::seeded(seed);
        let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(&mut r)).collect();
        HermitianMatrix::symmetrized(n, data)
    }

    fn unitarity_defect(eig: &SpectralDecomposition) -> f64 {
        let n = eig.dim();
        let u = eig.unitary();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ip: Complex64 = (0..n).map(|k| u[k * n + i].conj() * u[k * n + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                acc += (ip - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    #[test]
    fn diagonal_sorted_by_magnitude() {
        let z = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, -2.0]);
        let eig = z.eig();
        assert_eq!(eig.eigenvalues(), &[3.0, -2.0, 1.0]);
        // standard basis eigenvectors, permuted accordingly
        assert_eq!(eig.eigenvector(0), vec![ONE, ZERO, ZERO]);
        assert_eq!(eig.eigenvector(1), vec![ZERO, ZERO, ONE]);
        assert_eq!(eig.eigenvector(2), vec![ZERO, ONE, ZERO]);
    }

    #[test]
    fn zero_matrix() {
        let eig = HermitianMatrix::zeros(4).eig();
        assert!(eig.eigenvalues().iter().all(|l| *l == 0.0));
        assert!(unitarity_defect(&eig) == 0.0);
    }

    #[test]
    fn random_reconstruction() {
        for seed in 0..20 {
            let z = random_hermitian(seed, 6);
            let eig = z.eig();
            let err = (&eig.reconstruct() - &z).frobenius_norm();
            assert!(err <= 1e-10 * z.frobenius_norm().max(1.0), "seed {seed}: {err:e}");
            assert!(unitarity_defect(&eig) <= 1e-10);
        }
    }

    #[test]
    fn eigenpairs_satisfy_equation() {
        let z = random_hermitian(99, 9);
        let eig = z.eig();
        for k in 0..9 {
            let v = eig.eigenvector(k);
            let zv = dense::matvec(9, z.entries(), &v);
            let resid: f64 = zv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * eig.eigenvalues()[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-11);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // projector onto a random 3-dimensional subspace of C^7
        let mut r = rng::seeded(4);
        let u = rng::haar_unitary_columns(&mut r, 7);
        let z = HermitianMatrix::from_spectrum(&[1.0, 1.0, 1.0], &u[..3]);
        let eig = z.eig();
        for (k, l) in eig.eigenvalues().iter().enumerate() {
            let target = if k < 3 { 1.0 } else { 0.0 };
            assert!((l - target).abs() < 1e-12);
        }
        assert!((&eig.reconstruct() - &z).frobenius_norm() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let z = random_hermitian(17, 8);
        let a = z.eig();
        let b = z.eig();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        assert_eq!(a.unitary(), b.unitary());
    }

    #[test]
    fn large_dynamic_range() {
        let mut r = rng::seeded(2);
        let u = rng::haar_unitary_columns(&mut r, 3);
        let rotated = HermitianMatrix::from_spectrum(&[1e8, 1e-8, -3.0], &u);
        let eig = rotated.eig();
        assert!((eig.eigenvalues()[0] - 1e8).abs() < 1e-6);
        assert!((eig.eigenvalues()[1] + 3.0).abs() < 1e-6);
    }
}
