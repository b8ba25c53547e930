//! Sample a measurement ensemble, apply the operator and its adjoint, and
//! inject noise of exact size in each l_q norm.
//!
//! Run with `cargo run --release --example measurements`.

use designlift::designs::stabilizer_design;
use designlift::measurement::{noise_vector, sample_ensemble, EnsembleSource, NoiseShape, NormExponent};
use designlift::theory::random_unit_hermitian;

fn main() -> designlift::Result<()> {
    let d = stabilizer_design(2)?;
    for m in [8, 16, 32] {
        let e = sample_ensemble(EnsembleSource::Design(&d), m, 1)?;
        let s = e.singular_values();
        println!(
            "m = {m:2}: scaling {:.4}, singular values {:.3} .. {:.3}",
            e.scaling(),
            s.first().unwrap(),
            s.last().unwrap()
        );
    }

    let e = sample_ensemble(EnsembleSource::Sphere(4), 20, 2)?;
    let x = random_unit_hermitian(4, 3);
    let y = random_unit_hermitian(4, 4);
    let ax = e.apply(&x)?;
    let aty = e.adjoint(&e.apply(&y)?)?;
    let lhs: f64 = ax.iter().zip(e.apply(&y)?).map(|(a, b)| a * b).sum();
    println!("<A(X), A(Y)> = {lhs:.10}, <X, A*A(Y)> = {:.10}", x.frobenius_inner(&aty));

    for shape in [NoiseShape::AdversarialUniform, NoiseShape::GaussianRescaled] {
        for q in [NormExponent::One, NormExponent::Two, NormExponent::Inf] {
            let eps = noise_vector(20, 0.1, q, shape, 5)?;
            println!("{shape:?} q = {q}: ||eps||_q = {:.12}", q.norm(&eps));
        }
    }
    Ok(())
}
