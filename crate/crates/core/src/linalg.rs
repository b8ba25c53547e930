//! Real linear algebra on the coordinate space of Hermitian matrices.
//!
//! `H_n` is identified with `R^{n^2}` through the orthonormal basis
//! `E_kk`, `(E_jk + E_kj)/sqrt2`, `i(E_jk - E_kj)/sqrt2` (j < k), which turns the
//! Frobenius inner product into the Euclidean one.

use num_complex::Complex64;

use crate::dense::ZERO;
use crate::hermitian::HermitianMatrix;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub(crate) fn to_coords(z: &HermitianMatrix) -> Vec<f64> {
    let n = z.dim();
    let mut c = Vec::with_capacity(n * n);
    for k in 0..n {
        c.push(z.get(k, k).re);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let v = z.get(j, k);
            c.push(SQRT_2 * v.re);
            c.push(SQRT_2 * v.im);
        }
    }
    c
}

pub(crate) fn from_coords(n: usize, c: &[f64]) -> HermitianMatrix {
    assert_eq!(c.len(), n * n);
    let mut data = vec![ZERO; n * n];
    for k in 0..n {
        data[k * n + k] = Complex64::new(c[k], 0.0);
    }
    let mut idx = n;
    for j in 0..n {
        for k in (j + 1)..n {
            let v = Complex64::new(c[idx], c[idx + 1]) / SQRT_2;
            data[j * n + k] = v;
            data[k * n + j] = v.conj();
            idx += 2;
        }
    }
    HermitianMatrix::symmetrized(n, data)
}

/// Coordinates of the rank-one matrix `a a*`.
pub(crate) fn outer_coords(a: &[Complex64]) -> Vec<f64> {
    let n = a.len();
    let mut c = Vec::with_capacity(n * n);
    for k in 0..n {
        c.push(a[k].norm_sqr());
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let v = a[j] * a[k].conj();
            c.push(SQRT_2 * v.re);
            c.push(SQRT_2 * v.im);
        }
    }
    c
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub(crate) struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub(crate) fn factor(a: &[f64], n: usize) -> Option<Self> {
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Some(Self { n, l })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}
