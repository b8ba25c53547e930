//! Probe the robust rank null space property on cone samples and random
//! directions, for an injective ensemble and for one with too few measurements.
//!
//! Run with `cargo run --release --example null_space_property`.

use designlift::designs::stabilizer_design;
use designlift::measurement::{sample_ensemble, EnsembleSource, NormExponent};
use designlift::theory::{injectivity_tau, nsp_check, nsp_test_matrices};

fn main() -> designlift::Result<()> {
    let d = stabilizer_design(2)?;
    let (r, rho) = (1, 0.5);
    let zs = nsp_test_matrices(d.dim(), r, rho, 400, 51)?;
    for m in [4, 8, 32] {
        let e = sample_ensemble(EnsembleSource::Design(&d), m, 52)?;
        let (tau, note) = match injectivity_tau(&e, NormExponent::Two) {
            Ok(t) => (t, "injective"),
            Err(_) => (0.1, "not injective, probing tau = 0.1"),
        };
        let w = nsp_check(&e, rho, tau, r, NormExponent::Two, &zs)?;
        println!("m = {m:2} ({note}): tau = {tau:.3}, violations {} / {}", w.violations(), zs.len());
    }
    Ok(())
}
