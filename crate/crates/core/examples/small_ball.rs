//! Small-ball probabilities over the cone of approximately low-rank
//! directions: exact probabilities under the stabilizer design against the
//! analytic lower bound, and the Paley-Zygmund inequality they rest on.
//!
//! Run with `cargo run --release --example small_ball`.

use designlift::designs::stabilizer_design;
use designlift::theory::{
    cone_samples, extremal_candidates, lemma1_bound_check, lemma3_bound_check, paley_zygmund_check,
    FiniteDistribution,
};

fn main() -> designlift::Result<()> {
    let d = stabilizer_design(3)?;
    let (r, rho) = (1, 0.5);
    let mut samples = cone_samples(d.dim(), r, rho, 200, 31)?;
    samples.extend(extremal_candidates(d.dim(), r, rho, 4, 32)?);
    println!("{} cone samples in dimension {}", samples.len(), d.dim());

    for theta in [0.0, 0.25, 0.5, 0.75] {
        let exact = lemma1_bound_check(&d, &samples, theta)?;
        let weak = lemma3_bound_check(&d, &samples, theta, rho, r)?;
        println!(
            "theta = {theta:.2}: min Q = {:.4}, exact-design bound {:.5}, approximate-design bound {:.6}, violations {}",
            exact.q_value,
            exact.bound,
            weak.bound,
            exact.violations + weak.violations
        );
    }

    let dist = FiniteDistribution::from_design(&d, &samples[0].matrix)?;
    for p in [1.5, 2.0, 3.0] {
        let c = paley_zygmund_check(&dist, p, 0.25)?;
        println!("Paley-Zygmund p = {p}: P(W > theta E W) = {:.4} >= {:.4}", c.lhs, c.rhs);
    }
    Ok(())
}
