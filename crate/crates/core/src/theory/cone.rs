//! Samples from the cone `T = {Z : ||Z||_F = 1, ||Z_r||_F > (rho/sqrt r) ||Z_c||_*}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::rng::{self, Rng};

/// Acceptance requires the cone margin to exceed this.
pub const CONE_MARGIN_FLOOR: f64 = 1e-8;
pub const DEFAULT_HEAD_MASS: f64 = 0.9;
pub const DEFAULT_MAX_TRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSample {
    pub matrix: HermitianMatrix,
    pub rho: f64,
    pub rank_param: usize,
    /// `||Z_r||_F - (rho/sqrt r) ||Z_c||_*`.
    pub margin: f64,
}

/// `sqrt(1 + (1 + 1/rho)^2)`, the factor bounding `||Z||_*/sqrt(r)` on the cone.
pub fn kappa(rho: f64) -> f64 {
    (1.0 + (1.0 + 1.0 / rho).powi(2)).sqrt()
}

pub(crate) fn check_cone_parameters(n: usize, r: usize, rho: f64) -> Result<()> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::param(format!("rank parameter {r} outside 1..={n}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok(())
}

pub fn cone_margin(z: &HermitianMatrix, r: usize, rho: f64) -> Result<f64> {
    let (head, tail) = z.rank_split(r)?;
    Ok(head.frobenius_norm() - rho / (r as f64).sqrt() * tail.norm(SchattenNorm::Nuclear))
}

/// Wraps `z` (rescaled to unit Frobenius norm) if it lies in the cone.
pub fn cone_sample_from(z: &HermitianMatrix, r: usize, rho: f64) -> Result<Option<ConeSample>> {
    check_cone_parameters(z.dim(), r, rho)?;
    let f = z.frobenius_norm();
    if f == 0.0 {
        return Ok(None);
    }
    let matrix = z.scaled(1.0 / f);
    let margin = cone_margin(&matrix, r, rho)?;
    Ok((margin > CONE_MARGIN_FLOOR).then_some(ConeSample {
        matrix,
        rho,
        rank_param: r,
        margin,
    }))
}

/// Haar eigenbasis with a Gaussian spectrum split into a rank-`r` head and
/// a tail, mixed as `beta * head + (1 - beta) * tail` (each part normalized)
/// and then rejection-tested against the cone condition.
#[derive(Clone, Copy, Debug)]
pub struct ConeSampler {
    pub dim: usize,
    pub rank: usize,
    pub rho: f64,
    pub head_mass: f64,
    pub max_tries: usize,
}

impl ConeSampler {
    pub fn new(dim: usize, rank: usize, rho: f64) -> Result<Self> {
        check_cone_parameters(dim, rank, rho)?;
        Ok(Self {
            dim,
            rank,
            rho,
            head_mass: DEFAULT_HEAD_MASS,
            max_tries: DEFAULT_MAX_TRIES,
        })
    }

    pub fn with_head_mass(mut self, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::param(format!("head mass must lie in [0, 1], got {beta}")));
        }
        self.head_mass = beta;
        Ok(self)
    }

    /// One unconditioned draw before the cone test.
    pub fn proposal(&self, rng: &mut Rng) -> HermitianMatrix {
        let n = self.dim;
        let basis = rng::haar_unitary_columns(rng, n);
        let mut head: Vec<f64> = (0..self.rank).map(|_| rng::standard_normal(rng)).collect();
        let mut tail: Vec<f64> = (self.rank..n).map(|_| rng::standard_normal(rng)).collect();
        let hn = head.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tn = tail.iter().map(|x| x * x).sum::<f64>().sqrt();
        let beta = if tail.is_empty() { 1.0 } else { self.head_mass };
        head.iter_mut().for_each(|x| *x *= beta / hn.max(f64::MIN_POSITIVE));
        tail.iter_mut().for_each(|x| *x *= (1.0 - beta) / tn.max(f64::MIN_POSITIVE));
        head.extend(tail);
        HermitianMatrix::from_spectrum(&head, &basis)
    }

    /// Draws until a proposal lies in the cone; returns the sample and the
    /// number of proposals used.
    pub fn sample(&self, rng: &mut Rng) -> Result<(ConeSample, usize)> {
        for tries in 1..=self.max_tries {
            let z = self.proposal(rng);
            if let Some(s) = cone_sample_from(&z, self.rank, self.rho)? {
                return Ok((s, tries));
            }
        }
        Err(Error::RejectionBudget {
            tries: self.max_tries,
        })
    }
}

pub fn sample_cone(n: usize, r: usize, rho: f64, seed: u64) -> Result<ConeSample> {
    let sampler = ConeSampler::new(n, r, rho)?;
    Ok(sampler.sample(&mut rng::seeded(seed))?.0)
}

/// `count` independent cone samples, the `i`-th seeded by `(seed, i)`.
pub fn cone_samples(n: usize, r: usize, rho: f64, count: usize, seed: u64) -> Result<Vec<ConeSample>> {
    (0..count)
        .map(|i| sample_cone(n, r, rho, rng::derive_seed(seed, &[i as u64])))
        .collect()
}

/// Traceless rank-`2r` matrices with spectrum `±1/sqrt(2r)`, in the standard
/// basis and in `extra_bases` Haar-random bases, kept when they lie in the cone.
pub fn extremal_candidates(n: usize, r: usize, rho: f64, extra_bases: usize, seed: u64) -> Result<Vec<ConeSample>> {
    check_cone_parameters(n, r, rho)?;
    if 2 * r > n {
        return Ok(Vec::new());
    }
    let level = 1.0 / ((2 * r) as f64).sqrt();
    let mut spectrum = vec![0.0; n];
    for (k, s) in spectrum.iter_mut().take(2 * r).enumerate() {
        *s = if k < r { level } else { -level };
    }
    let mut out = Vec::new();
    let standard: Vec<Vec<Complex64>> = (0..n)
        .map(|k| (0..n).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut bases = vec![standard];
    let mut r_ = rng::seeded(seed);
    for _ in 0..extra_bases {
        bases.push(rng::haar_unitary_columns(&mut r_, n));
    }
    for basis in bases {
        let z = HermitianMatrix::from_spectrum(&spectrum, &basis);
        if let Some(s) = cone_sample_from(&z, r, rho)? {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_never_rejects() {
        let sampler = ConeSampler::new(4, 4, 0.5).unwrap();
        let mut r = rng::seeded(1);
        for _ in 0..50 {
            let (s, tries) = sampler.sample(&mut r).unwrap();
            assert_eq!(tries, 1);
            assert!((s.matrix.frobenius_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn acceptance_rate_with_default_head_mass() {
        let sampler = ConeSampler::new(8, 2, 0.5).unwrap();
        let mut r = rng::seeded(2);
        let accepted = (0..1000)
            .filter(|_| cone_sample_from(&sampler.proposal(&mut r), 2, 0.5).unwrap().is_some())
            .count();
        assert!(accepted >= 500, "accepted {accepted}");
    }

    #[test]
    fn samples_satisfy_invariants() {
        for s in cone_samples(6, 2, 0.8, 20, 3).unwrap() {
            assert!((s.matrix.frobenius_norm() - 1.0).abs() < 1e-10);
            assert!(s.margin > CONE_MARGIN_FLOOR);
            assert!((cone_margin(&s.matrix, 2, 0.8).unwrap() - s.margin).abs() < 1e-12);
        }
    }

    #[test]
    fn pathological_parameters_exhaust_budget() {
        // A pure Gaussian tail over 15 eigenvalues essentially never has its
        // top eigenvalue dominate 0.99 times the rest.
        let sampler = ConeSampler::new(16, 1, 0.99).unwrap().with_head_mass(0.0).unwrap();
        let mut s = sampler;
        s.max_tries = 20;
        assert!(matches!(s.sample(&mut rng::seeded(4)), Err(Error::RejectionBudget { tries: 20 })));
    }

    #[test]
    fn extremal_candidates_are_traceless() {
        let c = extremal_candidates(8, 2, 0.5, 3, 5).unwrap();
        assert_eq!(c.len(), 4);
        for s in &c {
            assert!(s.matrix.trace().abs() < 1e-12);
            assert!((s.matrix.norm(SchattenNorm::Nuclear) - 2.0).abs() < 1e-10);
        }
        assert!(extremal_candidates(3, 2, 0.5, 1, 5).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_cone(4, 0, 0.5, 1).is_err());
        assert!(sample_cone(4, 5, 0.5, 1).is_err());
        assert!(sample_cone(4, 1, 1.0, 1).is_err());
        assert!(sample_cone(4, 1, 0.0, 1).is_err());
    }
}
