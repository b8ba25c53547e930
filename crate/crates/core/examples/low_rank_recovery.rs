//! Recover a random rank-one Hermitian matrix from stabilizer-state
//! measurements and compare the splitting solver against the subgradient
//! cross-check.
//!
//! Run with `cargo run --release --example low_rank_recovery`.

use designlift::designs::stabilizer_design;
use designlift::measurement::{
    sample_ensemble, simulate_measurements, EnsembleSource, NoiseShape, NormExponent,
};
use designlift::rng;
use designlift::solver::{diagnostics, recover, subgradient_crosscheck, SolverConfig, SubgradientBudget};
use designlift::HermitianMatrix;

fn main() -> designlift::Result<()> {
    let design = stabilizer_design(3)?;
    let n = design.dim();
    let m = 144;

    let mut r = rng::seeded(11);
    let a = rng::unit_vector(&mut r, n);
    let x = HermitianMatrix::outer(&a);

    for (seed, eta) in [(1, 0.0), (2, 0.05)] {
        let ensemble = sample_ensemble(EnsembleSource::Design(&design), m, seed)?;
        let problem = simulate_measurements(&ensemble, &x, eta, NormExponent::Two, NoiseShape::GaussianRescaled, seed)?;
        let result = recover(&problem, &SolverConfig::default())?;
        let error = (&result.solution - &x).frobenius_norm();
        println!("eta = {eta}: relative error {error:.3e}");
        println!("{}", diagnostics(&result, &problem)?);

        let check = subgradient_crosscheck(&problem, &SubgradientBudget::default())?;
        println!(
            "cross-check objective {:.6} vs splitting {:.6} ({} iterations{})\n",
            check.objective,
            result.objective,
            check.iterations,
            if check.exhausted { ", budget exhausted" } else { "" }
        );
    }
    Ok(())
}
