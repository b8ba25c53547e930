//! Batch runner behind `designlift verify-theory`: evaluates a family of
//! checks on one design and emits rows `suite,instance_id,lhs,rhs,slack,pass`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::hermitian::io::fmt_f64;
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::measurement::{sample_ensemble, EnsembleSource, NormExponent};
use crate::rng;

use super::cone::{cone_samples, extremal_candidates, kappa};
use super::moments::{
    exact_moment, mixed_third_moment_direct, mixed_third_moment_sym3, second_moment_identity,
    third_moment_bound_check,
};
use super::nsp::{injectivity_tau, nsp_check, nsp_test_matrices};
use super::paley_zygmund::{paley_zygmund_check, FiniteDistribution};
use super::small_ball::{lemma1_bound, small_ball_exact};
use super::wm::wm_estimate;
use super::BoundCheck;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Moments,
    SmallBall,
    PaleyZygmund,
    Wm,
    Nsp,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moments" => Ok(Suite::Moments),
            "smallball" => Ok(Suite::SmallBall),
            "pz" => Ok(Suite::PaleyZygmund),
            "wm" => Ok(Suite::Wm),
            "nsp" => Ok(Suite::Nsp),
            "all" => Ok(Suite::All),
            other => Err(Error::param(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Matrices per check, and Monte-Carlo trials for `wm`.
    pub samples: usize,
    pub seed: u64,
    pub rho: f64,
    pub rank: usize,
    pub theta: f64,
    pub pz_exponent: f64,
    /// Measurements for `wm` and `nsp`; defaults to `2 n^2`.
    pub m: Option<usize>,
    /// NSP constant; defaults to the injectivity value `1/sigma_min`.
    pub tau: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 0,
            rho: 0.5,
            rank: 1,
            theta: 0.25,
            pz_exponent: 1.5,
            m: None,
            tau: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryRow {
    pub suite: String,
    pub instance_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl TheoryRow {
    fn new(suite: &str, instance: impl fmt::Display, check: BoundCheck) -> Self {
        Self {
            suite: suite.to_owned(),
            instance_id: instance.to_string(),
            lhs: check.lhs,
            rhs: check.rhs,
            slack: check.slack,
            pass: check.pass,
        }
    }
}

/// Unit-Frobenius Hermitian matrix with i.i.d. complex Gaussian entries.
pub fn random_unit_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut r = rng::seeded(seed);
    let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(&mut r)).collect();
    let z = HermitianMatrix::symmetrized(n, data);
    z.scaled(1.0 / z.frobenius_norm())
}

pub fn run_suite(d: &Design, suite: Suite, opts: &SuiteOptions) -> Result<Vec<TheoryRow>> {
    let n = d.dim();
    let r = opts.rank.min(n);
    let mut rows = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;

    let cone = if want(Suite::Moments) || want(Suite::SmallBall) || want(Suite::PaleyZygmund) {
        let mut c = cone_samples(n, r, opts.rho, opts.samples, rng::derive_seed(opts.seed, &[1]))?;
        c.extend(extremal_candidates(n, r, opts.rho, 4, rng::derive_seed(opts.seed, &[2]))?);
        c
    } else {
        Vec::new()
    };

    if want(Suite::Moments) {
        for i in 0..opts.samples {
            let z = random_unit_hermitian(n, rng::derive_seed(opts.seed, &[3, i as u64]));
            let lhs = exact_moment(d, &z, 2)?;
            rows.push(TheoryRow::new("moments", format!("second_moment/{i}"), BoundCheck::equal(lhs, second_moment_identity(&z), 1e-9)));
            let direct = mixed_third_moment_direct(d, &z)?;
            let via_sym3 = mixed_third_moment_sym3(&z)?;
            rows.push(TheoryRow::new("moments", format!("sym3_path/{i}"), BoundCheck::equal(direct, via_sym3, 1e-9)));
        }
        for (i, s) in cone.iter().enumerate() {
            rows.push(TheoryRow::new("moments", format!("third_moment_bound/{i}"), third_moment_bound_check(d, s)?));
            let nuclear = s.matrix.norm(SchattenNorm::Nuclear);
            let limit = kappa(s.rho) * (s.rank_param as f64).sqrt();
            rows.push(TheoryRow::new("moments", format!("cone_nuclear/{i}"), BoundCheck::upper(nuclear, limit, 1e-9)));
        }
    }
    if want(Suite::SmallBall) {
        for (i, s) in cone.iter().enumerate() {
            let q = small_ball_exact(d, &s.matrix, opts.theta)?;
            let bound = lemma1_bound(opts.theta, s.rho, s.rank_param);
            rows.push(TheoryRow::new("smallball", format!("small_ball/{i}"), BoundCheck::lower(q, bound, 0.0)));
        }
    }
    if want(Suite::PaleyZygmund) {
        for (i, s) in cone.iter().enumerate() {
            let dist = FiniteDistribution::from_design(d, &s.matrix)?;
            // The inequality is applied to W = |tr(AZ)|^2 at level theta^2.
            let check = paley_zygmund_check(&dist, opts.pz_exponent, opts.theta * opts.theta)?;
            rows.push(TheoryRow::new("pz", format!("paley_zygmund/{i}"), check));
        }
    }
    let m = opts.m.unwrap_or(2 * n * n);
    if want(Suite::Wm) {
        let est = wm_estimate(EnsembleSource::Design(d), m, opts.samples.max(1), rng::derive_seed(opts.seed, &[4]), r, opts.rho)?;
        let rhs = est.operator_bound + 2.0 * est.standard_error;
        rows.push(TheoryRow::new("wm", format!("operator_norm/m={m}"), BoundCheck::upper(est.mean_h_norm, rhs, 0.0)));
    }
    if want(Suite::Nsp) {
        let e = sample_ensemble(EnsembleSource::Design(d), m, rng::derive_seed(opts.seed, &[5]))?;
        let tau = match opts.tau {
            Some(t) => t,
            None => injectivity_tau(&e, NormExponent::Two)?,
        };
        let zs = nsp_test_matrices(n, r, opts.rho, opts.samples, rng::derive_seed(opts.seed, &[6]))?;
        let w = nsp_check(&e, opts.rho, tau, r, NormExponent::Two, &zs)?;
        for (i, v) in w.verdicts.iter().enumerate() {
            rows.push(TheoryRow::new("nsp", format!("nsp/{i}"), BoundCheck::upper(v.lhs, v.rhs, 0.0).with_pass(v.holds)));
        }
    }
    Ok(rows)
}

pub fn write_theory_report(out: &mut impl Write, rows: &[TheoryRow]) -> std::io::Result<()> {
    writeln!(out, "suite,instance_id,lhs,rhs,slack,pass")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.suite,
            row.instance_id,
            fmt_f64(row.lhs),
            fmt_f64(row.rhs),
            fmt_f64(row.slack),
            row.pass
        )?;
    }
    Ok(())
}

pub fn save_theory_report(path: impl AsRef<Path>, rows: &[TheoryRow]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_theory_report(&mut buf, rows).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::stabilizer_design;

    #[test]
    fn all_suites_pass_on_two_qubit_stabilizers() {
        let d = stabilizer_design(2).unwrap();
        let opts = SuiteOptions {
            samples: 20,
            seed: 7,
            ..Default::default()
        };
        let rows = run_suite(&d, Suite::All, &opts).unwrap();
        for s in ["moments", "smallball", "pz", "wm", "nsp"] {
            assert!(rows.iter().any(|r| r.suite == s), "missing {s}");
        }
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }

    #[test]
    fn report_has_six_columns() {
        let d = stabilizer_design(1).unwrap();
        let rows = run_suite(&d, Suite::PaleyZygmund, &SuiteOptions { samples: 3, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        write_theory_report(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.split(',').count() == 6));
        assert_eq!(text.lines().count(), rows.len() + 1);
    }
}
