//! Stabilizer states on `k` qubits, an exact projective 3-design in `C^{2^k}`.
//!
//! Binary vectors of `F_2^{2k}` are packed into a `u32`: bit `q` is the X part
//! and bit `k + q` the Z part of qubit `q`. Each Lagrangian subspace together
//! with a sign vector fixes one state as the joint +1 eigenvector of the signed
//! Pauli generators.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Design, Normalization};
use crate::dense::{self, ONE, ZERO};
use crate::error::{Error, Result};

pub const MAX_STABILIZER_QUBITS: usize = 3;

/// `2^k prod_{j=1..k} (2^j + 1)`.
pub fn stabilizer_state_count(k: usize) -> usize {
    (1..=k).fold(1usize << k, |acc, j| acc * ((1usize << j) + 1))
}

pub fn stabilizer_design(k: usize) -> Result<Design> {
    if k == 0 || k > MAX_STABILIZER_QUBITS {
        return Err(Error::param(format!(
            "stabilizer designs are built for 1..={MAX_STABILIZER_QUBITS} qubits, got {k}"
        )));
    }
    let n = 1usize << k;
    let states: Vec<Vec<Complex64>> = lagrangian_subspaces(k)
        .par_iter()
        .flat_map_iter(|gens| {
            (0..1u32 << k).map(move |signs| stabilizer_state(k, gens, signs))
        })
        .collect();

    let mut distinct: Vec<Vec<Complex64>> = Vec::with_capacity(states.len());
    for s in states {
        if distinct
            .iter()
            .all(|d| dense::inner(d, &s).norm() < 1.0 - 1e-9)
        {
            distinct.push(s);
        }
    }
    let expected = stabilizer_state_count(k);
    if distinct.len() != expected {
        return Err(Error::InvalidDesign {
            index: distinct.len(),
            reason: format!("found {} stabilizer states, expected {expected}", distinct.len()),
        });
    }
    let w = 1.0 / expected as f64;
    let weights = vec![w; expected];
    Design::new(n, distinct, weights, Normalization::Unit)
}

fn symplectic(k: usize, a: u32, b: u32) -> u32 {
    let mask = (1u32 << k) - 1;
    let (ax, az) = (a & mask, a >> k);
    let (bx, bz) = (b & mask, b >> k);
    ((ax & bz).count_ones() + (az & bx).count_ones()) & 1
}

fn span_mask(gens: &[u32]) -> u64 {
    let mut elems = vec![0u32];
    for &g in gens {
        let shifted: Vec<u32> = elems.iter().map(|e| e ^ g).collect();
        elems.extend(shifted);
    }
    elems.iter().fold(0u64, |m, &e| m | (1u64 << e))
}

/// Every maximal isotropic subspace, each given by a canonical generator list
/// (greedy over the sorted elements), ordered by membership mask.
fn lagrangian_subspaces(k: usize) -> Vec<Vec<u32>> {
    let total = 1u32 << (2 * k);
    let mut found = BTreeSet::new();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(gens) = stack.pop() {
        if gens.len() == k {
            found.insert(span_mask(&gens));
            continue;
        }
        let span = span_mask(&gens);
        let start = gens.last().map_or(1, |g| g + 1);
        for v in start..total {
            if span & (1u64 << v) != 0 {
                continue;
            }
            if gens.iter().all(|&g| symplectic(k, g, v) == 0) {
                let mut next = gens.clone();
                next.push(v);
                stack.push(next);
            }
        }
    }
    found
        .into_iter()
        .map(|mask| {
            let mut gens = Vec::with_capacity(k);
            for v in 1..total {
                if mask & (1u64 << v) != 0 && span_mask(&gens) & (1u64 << v) == 0 {
                    gens.push(v);
                }
            }
            gens
        })
        .collect()
}

/// Hermitian Pauli operator for a packed binary vector. Qubit 0 is the most
/// significant tensor factor.
fn pauli(k: usize, v: u32) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let mut m = vec![ONE];
    let mut dim = 1;
    for q in 0..k {
        let x = (v >> q) & 1;
        let z = (v >> (k + q)) & 1;
        let single = match (x, z) {
            (0, 0) => [ONE, ZERO, ZERO, ONE],
            (1, 0) => [ZERO, ONE, ONE, ZERO],
            (0, 1) => [ONE, ZERO, ZERO, -ONE],
            _ => [ZERO, -i, i, ZERO],
        };
        m = dense::kron(&m, dim, &single, 2);
        dim *= 2;
    }
    m
}

fn stabilizer_state(k: usize, gens: &[u32], signs: u32) -> Vec<Complex64> {
    let n = 1usize << k;
    let mut proj = vec![ZERO; n * n];
    for d in 0..n {
        proj[d * n + d] = ONE;
    }
    for (j, &g) in gens.iter().enumerate() {
        let s = if (signs >> j) & 1 == 0 { 1.0 } else { -1.0 };
        let p = pauli(k, g);
        let factor: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let id = if idx / n == idx % n { ONE } else { ZERO };
                (id + p[idx] * s) * 0.5
            })
            .collect();
        proj = dense::matmul(n, &proj, &factor);
    }
    // The projector has rank one, so its heaviest column is the state up to phase.
    let col = (0..n)
        .max_by(|&a, &b| proj[a * n + a].re.total_cmp(&proj[b * n + b].re))
        .unwrap_or(0);
    let mut v: Vec<Complex64> = (0..n).map(|r| proj[r * n + col]).collect();
    let norm = dense::norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let phase = lead.conj() / lead.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    for z in &mut v {
        if z.re.abs() < 1e-15 {
            z.re = 0.0;
        }
        if z.im.abs() < 1e-15 {
            z.im = 0.0;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(stabilizer_state_count(1), 6);
        assert_eq!(stabilizer_state_count(2), 60);
        assert_eq!(stabilizer_state_count(3), 1080);
        assert_eq!(lagrangian_subspaces(1).len(), 3);
        assert_eq!(lagrangian_subspaces(2).len(), 15);
        assert_eq!(lagrangian_subspaces(3).len(), 135);
    }

    #[test]
    fn single_qubit_states_are_the_octahedron() {
        let d = stabilizer_design(1).unwrap();
        assert_eq!(d.len(), 6);
        // Distinct states from different bases overlap with fidelity 1/2.
        for (a, va) in d.vectors().iter().enumerate() {
            for vb in &d.vectors()[a + 1..] {
                let f = dense::inner(va, vb).norm_sqr();
                assert!(f.abs() < 1e-12 || (f - 0.5).abs() < 1e-12, "fidelity {f}");
            }
        }
    }

    #[test]
    fn canonical_phase_is_real_positive() {
        let d = stabilizer_design(2).unwrap();
        for v in d.vectors() {
            let lead = v.iter().find(|z| z.norm() > 1e-9).unwrap();
            assert!(lead.im == 0.0 && lead.re > 0.0);
        }
    }

    #[test]
    fn states_are_eigenvectors_of_their_stabilizers() {
        let k = 2;
        let n = 4;
        let gens = &lagrangian_subspaces(k)[7];
        for signs in 0..4u32 {
            let v = stabilizer_state(k, gens, signs);
            for (j, &g) in gens.iter().enumerate() {
                let s = if (signs >> j) & 1 == 0 { 1.0 } else { -1.0 };
                let pv = dense::matvec(n, &pauli(k, g), &v);
                for (a, b) in pv.iter().zip(&v) {
                    assert!((a - b * s).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert!(stabilizer_design(0).is_err());
        assert!(stabilizer_design(4).is_err());
    }
}
