//! Low-rank Hermitian matrix recovery from rank-one measurements drawn from
//! complex projective 3-designs, together with tooling that numerically
//! certifies the design, moment and small-ball quantities the recovery
//! guarantee rests on.
//!
//! The crate is organized bottom-up:
//!
//! - [`hermitian`]: dense Hermitian matrices, Jacobi eigensolver, Schatten
//!   norms, rank splits, singular value thresholding, symmetrizer projectors.
//! - [`designs`]: weighted designs, stabilizer-state 3-designs, sphere
//!   sampling, and design-accuracy certificates.
//! - [`measurement`]: measurement ensembles, the operator `Z -> (tr(Z A_j))_j`,
//!   its adjoint and bounded noise.
//! - [`solver`]: nuclear-norm minimization over an `l_q` data-fidelity ball.
//! - [`theory`]: exact and Monte-Carlo checks of moment identities,
//!   small-ball bounds, Paley-Zygmund, Rademacher widths and the null space
//!   property.
//! - [`experiment`]: seeded phase-diagram, noise and design-comparison sweeps
//!   with CSV reports.
//!
//! Runnable walkthroughs for each capability live under `examples/`.

pub mod designs;
pub mod error;
pub mod experiment;
pub mod hermitian;
pub mod measurement;
pub mod rng;
pub mod solver;
pub mod theory;

mod dense;
mod linalg;

pub use dense::{kron, kron_vec};
pub use error::{Error, Result};
pub use hermitian::{HermitianMatrix, SchattenNorm, SpectralDecomposition};
