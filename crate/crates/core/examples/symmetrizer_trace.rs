//! Compare the closed-form `tr(P_sym3 (X ⊗ Y ⊗ Z))` with the projector
//! applied to an explicit Kronecker product.
//!
//! Run with `cargo run --release --example symmetrizer_trace`.

use designlift::hermitian::{kron3, sym3_trace, sym_projector, ProjectorKind};
use designlift::theory::random_unit_hermitian;

fn main() -> designlift::Result<()> {
    for n in 2..=5 {
        let p = sym_projector(n, 3, ProjectorKind::Dense)?;
        let dense = p.dense_matrix().expect("dense projector");
        let d = p.space_dim();
        println!("n = {n}: dim Sym^3 = {} (trace of projector {:.1})", p.symmetric_dim(), p.trace());
        for seed in 0..3 {
            let x = random_unit_hermitian(n, 3 * seed);
            let y = random_unit_hermitian(n, 3 * seed + 1);
            let z = random_unit_hermitian(n, 3 * seed + 2);
            let k = kron3(&x, &y, &z);
            let mut direct = 0.0;
            for i in 0..d {
                for j in 0..d {
                    direct += dense[i * d + j] * k[j * d + i].re;
                }
            }
            let closed = sym3_trace(&x, &y, &z)?;
            println!("  closed form {closed:+.12}  projector {direct:+.12}  gap {:.1e}", (closed - direct).abs());
        }
    }
    Ok(())
}
