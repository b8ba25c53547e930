//! Enumerate stabilizer states on 1 to 3 qubits, certify them as exact
//! 3-designs (but not 4-designs), and round-trip one through a design file.
//!
//! Run with `cargo run --release --example stabilizer_designs`.

use designlift::designs::{
    certify, load_design, save_design, stabilizer_design, stabilizer_state_count, AccuracyMethod,
};

fn main() -> designlift::Result<()> {
    for k in 1..=3 {
        let d = stabilizer_design(k)?;
        println!("{k} qubit(s): {} states (expected {}), dimension {}", d.len(), stabilizer_state_count(k), d.dim());
        for t in 1..=4 {
            let method = if k == 3 { AccuracyMethod::power_iteration() } else { AccuracyMethod::SymmetricSubspace };
            match certify(&d, t, method) {
                Ok(c) => println!(
                    "  t = {t}: theta_inf = {:.3e}  theta_1 = {}  ({})",
                    c.theta_inf,
                    c.theta_1.map_or("n/a".into(), |v| format!("{v:.3e}")),
                    method.name()
                ),
                Err(e) => println!("  t = {t}: {e}"),
            }
        }
    }

    let dir = std::env::temp_dir().join("designlift-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("stabilizer2.design");
    let d = stabilizer_design(2)?;
    save_design(&path, &d)?;
    let back = load_design(&path)?;
    println!("round trip through {}: identical = {}", path.display(), back == d);
    Ok(())
}
