//! Monte-Carlo estimate of the expected operator norm of a Rademacher sum
//! of measurement matrices, against the `3.1049 sqrt(n ln 2n)` bound.
//!
//! Run with `cargo run --release --example rademacher_width`.

use designlift::designs::stabilizer_design;
use designlift::measurement::EnsembleSource;
use designlift::theory::wm_estimate;

fn main() -> designlift::Result<()> {
    let d = stabilizer_design(3)?;
    for m in [50, 200, 800] {
        for (name, source) in [("stabilizer", EnsembleSource::Design(&d)), ("sphere", EnsembleSource::Sphere(8))] {
            let est = wm_estimate(source, m, 500, 41, 1, 0.5)?;
            println!(
                "{name:10} m = {m:3}: E||H|| = {:.4} +- {:.4} (bound {:.4}), W_m <= {:.4}",
                est.mean_h_norm, est.standard_error, est.operator_bound, est.width_bound
            );
        }
    }
    Ok(())
}
