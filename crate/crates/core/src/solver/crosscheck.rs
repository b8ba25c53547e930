//! Projected subgradient descent on the `q = 2` program, used as an
//! independent low-accuracy check of the splitting solver.

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SchattenNorm};
use crate::linalg;
use crate::measurement::{NormExponent, RecoveryProblem};

use super::projection::FidelityProjector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubgradientBudget {
    pub iterations: usize,
    /// First step length relative to the norm of the starting point.
    pub relative_step: f64,
    /// Stop early once the best objective stalls for this many iterations.
    pub patience: usize,
}

impl Default for SubgradientBudget {
    fn default() -> Self {
        Self {
            iterations: 3000,
            relative_step: 0.1,
            patience: 300,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrosscheckResult {
    /// Best nuclear norm over feasible iterates.
    pub objective: f64,
    pub solution: HermitianMatrix,
    pub iterations: usize,
    /// True when the iteration budget ran out before the objective stalled.
    pub exhausted: bool,
}

pub fn subgradient_crosscheck(p: &RecoveryProblem, budget: &SubgradientBudget) -> Result<CrosscheckResult> {
    if p.noise_exponent != NormExponent::Two {
        return Err(Error::param("the subgradient cross-check supports q = 2 only"));
    }
    if budget.iterations == 0 {
        return Err(Error::param("cross-check budget must allow at least one iteration"));
    }
    let n = p.dim();
    let d = n * n;
    let rows = p.ensemble.coordinate_rows();
    let proj = FidelityProjector::new(&rows, &p.observations, p.noise_budget, d);

    let mut x = proj.project(&vec![0.0; d]);
    let mut best = linalg::from_coords(n, &x);
    let mut best_obj = best.norm(SchattenNorm::Nuclear);
    let step0 = budget.relative_step * linalg::norm2(&x);
    if best_obj == 0.0 || step0 == 0.0 {
        return Ok(CrosscheckResult {
            objective: best_obj,
            solution: best,
            iterations: 0,
            exhausted: false,
        });
    }
    let mut since_improvement = 0;
    for k in 0..budget.iterations {
        let z = linalg::from_coords(n, &x);
        let eig = z.eig();
        let signs: Vec<f64> = eig.eigenvalues().iter().map(|l| l.signum()).collect();
        let g = linalg::to_coords(&HermitianMatrix::from_spectrum(&signs, &eig.columns()));
        let gn = linalg::norm2(&g).max(1.0);
        let step = step0 / ((k + 1) as f64).sqrt() / gn;
        let moved: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        x = proj.project(&moved);
        let candidate = linalg::from_coords(n, &x);
        let obj = candidate.norm(SchattenNorm::Nuclear);
        if obj < best_obj * (1.0 - 1e-10) {
            best_obj = obj;
            best = candidate;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= budget.patience {
                return Ok(CrosscheckResult {
                    objective: best_obj,
                    solution: best,
                    iterations: k + 1,
                    exhausted: false,
                });
            }
        }
    }
    Ok(CrosscheckResult {
        objective: best_obj,
        solution: best,
        iterations: budget.iterations,
        exhausted: true,
    })
}
