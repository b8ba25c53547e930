//! Median recovery error against the noise level, with the fitted slope,
//! for two measurement counts.
//!
//! Run with `cargo run --release --example noise_sweep`.

use designlift::experiment::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
kind = noise_sweep
design = stabilizer 3
n = 8
r = 1
m = 96, 192
trials = 10
noise = 0, 0.02, 0.04, 0.06, 0.08, 0.1
seed = 71
";

fn main() -> designlift::Result<()> {
    let report = run_experiment(&ExperimentConfig::parse(CONFIG)?, None)?;
    for c in &report.cells {
        println!("m = {:3} eta = {:.2}: median error {:.3e}", c.m, c.eta, c.median_rel_error);
    }
    for f in &report.fits {
        println!(
            "m = {:3}: slope {:.4}, correlation {:.5}, floor {:.1e}",
            f.m, f.slope, f.correlation, f.floor
        );
    }
    Ok(())
}
