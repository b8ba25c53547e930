//! Numerical certification of the quantities behind the recovery guarantee:
//! exact design moments, small-ball probabilities and their lower bounds,
//! the Paley-Zygmund inequality, the Rademacher width `W_m`, and the null
//! space property.
//!
//! Finite designs are handled by exact enumeration; everything else by
//! seeded Monte Carlo. The cone `T_{rho,r}` is explored with [`ConeSampler`].

mod cone;
mod moments;
mod nsp;
mod paley_zygmund;
mod small_ball;
mod suite;
mod wm;

pub use cone::{
    cone_margin, cone_sample_from, cone_samples, extremal_candidates, kappa, sample_cone,
    ConeSample, ConeSampler, CONE_MARGIN_FLOOR, DEFAULT_HEAD_MASS, DEFAULT_MAX_TRIES,
};
pub use moments::{
    exact_moment, measurement_values, mixed_third_moment_direct, mixed_third_moment_sym3,
    second_moment_identity, third_moment_bound, third_moment_bound_check,
};
pub use nsp::{injectivity_tau, nsp_check, nsp_test_matrices, nsp_verdict, NspVerdict, NspWitness};
pub use paley_zygmund::{paley_zygmund_check, FiniteDistribution};
pub use small_ball::{
    lemma1_bound, lemma1_bound_check, lemma3_bound, lemma3_bound_check, small_ball_exact,
    SmallBallReport,
};
pub use suite::{
    random_unit_hermitian, run_suite, save_theory_report, write_theory_report, Suite,
    SuiteOptions, TheoryRow,
};
pub use wm::{rademacher_sum, wm_estimate, WmEstimate, OPERATOR_NORM_CONSTANT};

/// Outcome of comparing a computed quantity with its bound or identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Positive when the check passes with room to spare.
    pub slack: f64,
    pub pass: bool,
}

impl BoundCheck {
    /// `lhs <= rhs + tol`.
    pub fn upper(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + tol,
        }
    }

    /// `lhs >= rhs - tol`.
    pub fn lower(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            slack: lhs - rhs,
            pass: lhs >= rhs - tol,
        }
    }

    /// `|lhs - rhs| <= tol`; slack is the unused part of the tolerance.
    pub fn equal(lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Self {
            lhs,
            rhs,
            slack: tol - gap,
            pass: gap <= tol,
        }
    }

    pub(crate) fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}
