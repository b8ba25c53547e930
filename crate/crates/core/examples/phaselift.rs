//! Phase retrieval by lifting: recover a vector from intensities
//! `|<a_j, x>|^2` through PSD-constrained nuclear-norm minimization, then read
//! `x` off the top eigenvector up to a global phase.
//!
//! Run with `cargo run --release --example phaselift`.

use num_complex::Complex64;

use designlift::designs::stabilizer_design;
use designlift::measurement::{sample_ensemble, simulate_measurements, EnsembleSource, NoiseShape, NormExponent};
use designlift::rng;
use designlift::solver::{recover_psd, SolverConfig};
use designlift::HermitianMatrix;

fn main() -> designlift::Result<()> {
    let design = stabilizer_design(3)?;
    let n = design.dim();
    let x = rng::unit_vector(&mut rng::seeded(21), n);
    let truth = HermitianMatrix::outer(&x);

    for m in [16, 32, 64, 96] {
        let e = sample_ensemble(EnsembleSource::Design(&design), m, 22)?;
        let p = simulate_measurements(&e, &truth, 0.0, NormExponent::Two, NoiseShape::GaussianRescaled, 0)?;
        let result = recover_psd(&p, &SolverConfig::default())?;
        let eig = result.solution.eig();
        let top = eig.eigenvalues()[0].max(0.0).sqrt();
        let v: Vec<Complex64> = eig.eigenvector(0).iter().map(|z| z * top).collect();
        let overlap: Complex64 = v.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        let phase = overlap / overlap.norm();
        let err = v
            .iter()
            .zip(&x)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        println!(
            "m = {m:3}: {} after {} iterations, vector error up to phase {err:.2e}",
            if result.converged { "converged" } else { "not converged" },
            result.iterations
        );
    }
    Ok(())
}
