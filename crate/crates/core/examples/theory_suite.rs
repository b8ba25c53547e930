//! Run every theory check against the two-qubit stabilizer design and
//! summarize pass counts per suite.
//!
//! Run with `cargo run --release --example theory_suite`.

use std::collections::BTreeMap;

use designlift::designs::stabilizer_design;
use designlift::theory::{run_suite, Suite, SuiteOptions};

fn main() -> designlift::Result<()> {
    let d = stabilizer_design(2)?;
    let opts = SuiteOptions { samples: 100, seed: 91, ..SuiteOptions::default() };
    let rows = run_suite(&d, Suite::All, &opts)?;
    let mut tally: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for row in &rows {
        let e = tally.entry(row.suite.as_str()).or_insert((0, 0, f64::INFINITY));
        e.0 += 1;
        e.1 += row.pass as usize;
        e.2 = e.2.min(row.slack);
    }
    for (suite, (total, passed, slack)) in tally {
        println!("{suite:10} {passed:4}/{total:<4} passed, min slack {slack:.3e}");
    }
    Ok(())
}
