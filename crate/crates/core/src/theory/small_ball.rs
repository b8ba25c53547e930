//! Exact small-ball probabilities `P(|tr(A Z)| >= theta)` over finite designs
//! and the two lower bounds they are checked against.

use crate::designs::{certify, AccuracyMethod, Design};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

use super::cone::{kappa, ConeSample};
use super::moments::measurement_values;

pub fn small_ball_exact(d: &Design, z: &HermitianMatrix, theta: f64) -> Result<f64> {
    let values = measurement_values(d, z)?;
    if values.iter().all(|v| v.abs() >= theta) {
        return Ok(1.0);
    }
    Ok(values
        .iter()
        .zip(d.weights())
        .filter(|(v, _)| v.abs() >= theta)
        .map(|(_, p)| p)
        .sum::<f64>()
        .min(1.0))
}

/// `(1 - theta^2)^3 / (36 (1 + (1+1/rho)^2) r)`, valid for exact 3-designs.
pub fn lemma1_bound(theta: f64, rho: f64, r: usize) -> f64 {
    (1.0 - theta * theta).powi(3) / (36.0 * kappa(rho).powi(2) * r as f64)
}

/// `(1 - theta^2)^3 / (450 (1 + (1+1/rho)^2) r)`, valid for approximate 3-designs.
pub fn lemma3_bound(theta: f64, rho: f64, r: usize) -> f64 {
    (1.0 - theta * theta).powi(3) / (450.0 * kappa(rho).powi(2) * r as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallBallReport {
    pub theta: f64,
    /// Minimum small-ball probability over the tested matrices: an upper
    /// estimate of the infimum over the cone.
    pub q_value: f64,
    /// Smallest bound among the tested samples (bounds depend on each
    /// sample's `rho` and `r`).
    pub bound: f64,
    pub samples: usize,
    pub violations: usize,
    /// `min(probability - bound)` over samples.
    pub min_slack: f64,
    /// Per-sample `(probability, bound)`.
    pub entries: Vec<(f64, f64)>,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param(format!("theta must lie in [0, 1], got {theta}")));
    }
    Ok(())
}

fn report(
    d: &Design,
    samples: &[ConeSample],
    theta: f64,
    bound: impl Fn(&ConeSample) -> f64,
) -> Result<SmallBallReport> {
    let mut entries = Vec::with_capacity(samples.len());
    for s in samples {
        entries.push((small_ball_exact(d, &s.matrix, theta)?, bound(s)));
    }
    let violations = entries.iter().filter(|(q, b)| q < b).count();
    Ok(SmallBallReport {
        theta,
        q_value: entries.iter().map(|e| e.0).fold(1.0, f64::min),
        bound: entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min),
        samples: samples.len(),
        violations,
        min_slack: entries.iter().map(|(q, b)| q - b).fold(f64::INFINITY, f64::min),
        entries,
    })
}

pub fn lemma1_bound_check(d: &Design, samples: &[ConeSample], theta: f64) -> Result<SmallBallReport> {
    check_theta(theta)?;
    report(d, samples, theta, |s| lemma1_bound(theta, s.rho, s.rank_param))
}

/// Refuses unless the design satisfies the accuracy hypothesis
/// (`theta_1 <= 1/4` or `theta_inf <= 1/(4 r kappa^2)`) and has frame
/// deviation at most `1/n`.
pub fn lemma3_bound_check(
    d: &Design,
    samples: &[ConeSample],
    theta: f64,
    rho: f64,
    r: usize,
) -> Result<SmallBallReport> {
    check_theta(theta)?;
    let cert = certify(d, 3, AccuracyMethod::SymmetricSubspace)?;
    let theta_1 = cert.theta_1.expect("spectral certificate carries theta_1");
    let inf_limit = 1.0 / (4.0 * r as f64 * kappa(rho).powi(2));
    if theta_1 > 0.25 && cert.theta_inf > inf_limit {
        return Err(Error::HypothesisViolated {
            quantity: "design accuracy theta_inf (theta_1 also above 1/4)".into(),
            value: cert.theta_inf,
            limit: inf_limit,
        });
    }
    let frame = cert.frame_deviation;
    let frame_limit = 1.0 / d.dim() as f64;
    if frame > frame_limit {
        return Err(Error::HypothesisViolated {
            quantity: "frame deviation".into(),
            value: frame,
            limit: frame_limit,
        });
    }
    report(d, samples, theta, |_| lemma3_bound(theta, rho, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::stabilizer_design;

    #[test]
    fn trivial_thresholds() {
        let d = stabilizer_design(1).unwrap();
        let z = HermitianMatrix::from_real_diagonal(&[0.6, -0.8]);
        assert_eq!(small_ball_exact(&d, &z, 0.0).unwrap(), 1.0);
        assert_eq!(small_ball_exact(&d, &z, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn qubit_enumeration() {
        // Z = diag(1,-1)/sqrt2: the Z-basis states give |tr(AZ)| = sqrt(6/2) = 1.73,
        // the other four give 0, so P(|.| >= 1) = 2/6.
        let d = stabilizer_design(1).unwrap();
        let z = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).scaled(1.0 / 2f64.sqrt());
        assert!((small_ball_exact(&d, &z, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bound_values() {
        assert_eq!(lemma1_bound(1.0, 0.5, 2), 0.0);
        assert!((lemma1_bound(0.0, 0.5, 1) - 1.0 / 360.0).abs() < 1e-15);
        assert!(lemma3_bound(0.3, 0.5, 2) < lemma1_bound(0.3, 0.5, 2));
        assert!((lemma3_bound(0.0, 0.5, 1) - 1.0 / 4500.0).abs() < 1e-15);
    }

    #[test]
    fn lemma3_refuses_inaccurate_designs() {
        let e = |i: usize| {
            let mut v = vec![num_complex::Complex64::new(0.0, 0.0); 4];
            v[i] = num_complex::Complex64::new(1.0, 0.0);
            v
        };
        let basis = Design::uniform(4, (0..4).map(e).collect()).unwrap();
        let r = lemma3_bound_check(&basis, &[], 0.2, 0.5, 1);
        assert!(matches!(r, Err(Error::HypothesisViolated { .. })));
    }
}
