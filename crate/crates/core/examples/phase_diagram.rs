//! Success rate of noiseless recovery as the number of stabilizer
//! measurements grows, from a config string, printed as the CSV report.
//!
//! Run with `cargo run --release --example phase_diagram`.

use designlift::experiment::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
kind = phase_diagram
design = stabilizer 3
n = 8
r = 1, 2
m = 12, 24, 36, 48, 72
trials = 10
seed = 61
";

fn main() -> designlift::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let report = run_experiment(&cfg, None)?;
    print!("{}", report.to_csv());
    Ok(())
}
