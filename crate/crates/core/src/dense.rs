//! Row-major dense complex helpers shared by the matrix and tensor code.

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `a * b` for square row-major matrices of order `n`.
pub(crate) fn matmul(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            let row_b = &b[k * n..(k + 1) * n];
            let row_out = &mut out[i * n..(i + 1) * n];
            for (o, bkj) in row_out.iter_mut().zip(row_b) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// `tr(a * b)` without forming the product.
pub(crate) fn trace_of_product(n: usize, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[i * n + k] * b[k * n + i];
        }
    }
    acc
}

#[cfg(test)]
pub(crate) fn trace(n: usize, a: &[Complex64]) -> Complex64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

/// `a x` for a row-major matrix `a` of order `n`.
#[cfg(test)]
pub(crate) fn matvec(n: usize, a: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().zip(x).map(|(aij, xj)| aij * xj).sum())
        .collect()
}

pub(crate) fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of two square row-major matrices of orders `an` and `bn`.
pub fn kron(a: &[Complex64], an: usize, b: &[Complex64], bn: usize) -> Vec<Complex64> {
    assert_eq!(a.len(), an * an, "left factor must be an x an");
    assert_eq!(b.len(), bn * bn, "right factor must be bn x bn");
    let n = an * bn;
    let mut out = vec![ZERO; n * n];
    for i in 0..an {
        for j in 0..an {
            let aij = a[i * an + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..bn {
                for l in 0..bn {
                    out[(i * bn + k) * n + j * bn + l] = aij * b[k * bn + l];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
