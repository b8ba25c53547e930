//! Stabilizer states against Haar-random vectors at matched measurement counts.
//!
//! Run with `cargo run --release --example design_comparison`.

use designlift::experiment::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
kind = design_comparison
design = stabilizer 3
design = sphere
n = 8
r = 1
m = 16, 24, 32, 48, 64
trials = 20
seed = 81
";

fn main() -> designlift::Result<()> {
    let report = run_experiment(&ExperimentConfig::parse(CONFIG)?, None)?;
    println!("{:>4}  {:>12}  {:>8}", "m", "stabilizer", "sphere");
    for m in &report.config.m {
        let rate = |label: &str| {
            report
                .cells
                .iter()
                .find(|c| c.m == *m && c.design == label)
                .map_or(f64::NAN, |c| c.success_rate)
        };
        println!("{m:>4}  {:>12.2}  {:>8.2}", rate("stabilizer3"), rate("sphere"));
    }
    Ok(())
}
