//! Nuclear-norm minimization `min ||Z||_* s.t. ||A(Z) - b||_q <= eta`.
//!
//! The program is split as `min ||W||_* + 1{y in ball}` subject to `Z = W` and
//! `A(Z) = y`, and solved by over-relaxed ADMM in the Hermitian coordinate
//! space, with the measurement block rescaled so both constraints carry
//! comparable weight. The `Z` step solves `(I + A*A) Z = rhs`, a system independent of the
//! penalty, so it is factored once. The `W` step is singular value
//! thresholding (clamped to the PSD cone for [`recover_psd`]) and the `y` step
//! is an `l_q` ball projection. With `eta = 0` the `y` block is dropped and the
//! `Z` step becomes the exact projection onto `{A(Z) = b}`.

mod crosscheck;
mod projection;

use std::fmt;

use crate::error::{Error, Result};
use crate::hermitian::{shrink, HermitianMatrix, SchattenNorm};
use crate::linalg::{self, Cholesky};
use crate::measurement::{NormExponent, RecoveryProblem};

pub use crosscheck::{subgradient_crosscheck, CrosscheckResult, SubgradientBudget};
pub use projection::project_lq_ball;

use projection::FidelityProjector;

/// Relative threshold used when reporting the rank of a solution.
pub const RANK_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub primal_tolerance: f64,
    pub dual_tolerance: f64,
    /// Initial ADMM penalty.
    pub penalty: f64,
    /// Relaxation factor in `[1, 1.9]`.
    pub over_relaxation: f64,
    /// Rescale the penalty by 2 whenever one residual exceeds the other tenfold,
    /// checked every 10 iterations and at most 30 times.
    pub adaptive_penalty: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            primal_tolerance: 1e-7,
            dual_tolerance: 1e-7,
            penalty: 1.0,
            over_relaxation: 1.6,
            adaptive_penalty: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        if !(self.primal_tolerance > 0.0) || !(self.dual_tolerance > 0.0) {
            return Err(Error::param("solver tolerances must be positive"));
        }
        if !(self.penalty > 0.0) || !self.penalty.is_finite() {
            return Err(Error::param("penalty must be positive"));
        }
        if !(1.0..=1.9).contains(&self.over_relaxation) {
            return Err(Error::param(format!(
                "over_relaxation {} outside [1, 1.9]",
                self.over_relaxation
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    pub penalty: f64,
}

#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub solution: HermitianMatrix,
    pub objective: f64,
    /// `max(||A(X#) - b||_q - eta, 0)`.
    pub feasibility_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub history: Vec<IterationRecord>,
}

pub fn recover(p: &RecoveryProblem, cfg: &SolverConfig) -> Result<RecoveryResult> {
    solve(p, cfg, false, &mut |_| {})
}

/// As [`recover`] with the additional constraint `Z >= 0`.
pub fn recover_psd(p: &RecoveryProblem, cfg: &SolverConfig) -> Result<RecoveryResult> {
    solve(p, cfg, true, &mut |_| {})
}

/// Runs the solver and reports every iteration to `progress`.
pub fn recover_with_callback(
    p: &RecoveryProblem,
    cfg: &SolverConfig,
    psd: bool,
    progress: &mut dyn FnMut(&IterationRecord),
) -> Result<RecoveryResult> {
    solve(p, cfg, psd, progress)
}

/// Solves `(I + R^T R) x = rhs`.
enum NormalSolver {
    Direct(Cholesky),
    /// `x = rhs - R^T (I + R R^T)^{-1} R rhs`, cheaper when `m < n^2`.
    Woodbury(Cholesky),
}

impl NormalSolver {
    fn new(rows: &[Vec<f64>], d: usize) -> Result<Self> {
        let m = rows.len();
        if m < d {
            let mut k = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    let v = linalg::dot(&rows[i], &rows[j]) + if i == j { 1.0 } else { 0.0 };
                    k[i * m + j] = v;
                    k[j * m + i] = v;
                }
            }
            Cholesky::factor(&k, m).map(NormalSolver::Woodbury)
        } else {
            let mut k = vec![0.0; d * d];
            for row in rows {
                for i in 0..d {
                    if row[i] == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        k[i * d + j] += row[i] * row[j];
                    }
                }
            }
            for i in 0..d {
                k[i * d + i] += 1.0;
            }
            Cholesky::factor(&k, d).map(NormalSolver::Direct)
        }
        .ok_or_else(|| Error::param("normal equations are not positive definite"))
    }

    fn solve(&self, rows: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
        match self {
            NormalSolver::Direct(ch) => ch.solve(rhs),
            NormalSolver::Woodbury(ch) => {
                let r_rhs: Vec<f64> = rows.iter().map(|row| linalg::dot(row, rhs)).collect();
                let t = ch.solve(&r_rhs);
                let mut x = rhs.to_vec();
                for (row, tj) in rows.iter().zip(&t) {
                    axpy(&mut x, -tj, row);
                }
                x
            }
        }
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn forward(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|row| linalg::dot(row, x)).collect()
}

fn transpose(rows: &[Vec<f64>], y: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (row, yj) in rows.iter().zip(y) {
        if *yj != 0.0 {
            axpy(&mut out, *yj, row);
        }
    }
    out
}

/// Spectral proximal step; returns the new iterate and its nuclear norm.
fn spectral_prox(n: usize, c: &[f64], tau: f64, psd: bool) -> (Vec<f64>, f64) {
    let z = linalg::from_coords(n, c);
    let eig = z.eig();
    let shrunk: Vec<f64> = eig
        .eigenvalues()
        .iter()
        .map(|l| {
            let s = shrink(*l, tau);
            if psd {
                s.max(0.0)
            } else {
                s
            }
        })
        .collect();
    let nuclear = shrunk.iter().map(|l| l.abs()).sum();
    let w = HermitianMatrix::from_spectrum(&shrunk, &eig.columns());
    (linalg::to_coords(&w), nuclear)
}

fn solve(
    p: &RecoveryProblem,
    cfg: &SolverConfig,
    psd: bool,
    progress: &mut dyn FnMut(&IterationRecord),
) -> Result<RecoveryResult> {
    cfg.validate()?;
    if !(p.noise_budget >= 0.0) {
        return Err(Error::param("noise budget must be >= 0"));
    }
    let n = p.dim();
    let d = n * n;
    let raw_rows = p.ensemble.coordinate_rows();
    if p.noise_budget == 0.0 {
        return solve_equality(p, cfg, psd, progress, &raw_rows);
    }
    // Measurement block scaled so that gamma^2 A*A has unit mean eigenvalue.
    let fro_sq: f64 = raw_rows.iter().map(|r| linalg::dot(r, r)).sum();
    let gamma = (d as f64 / fro_sq).sqrt();
    let rows: Vec<Vec<f64>> = raw_rows.iter().map(|r| r.iter().map(|x| x * gamma).collect()).collect();
    let b_scaled: Vec<f64> = p.observations.iter().map(|x| x * gamma).collect();
    let b = &b_scaled;
    let eta = p.noise_budget * gamma;
    let q = p.noise_exponent;
    let normal = NormalSolver::new(&rows, d)?;
    let alpha = cfg.over_relaxation;
    let scale = linalg::norm2(&p.observations).max(1.0);
    let (tol_p, tol_d) = (cfg.primal_tolerance * scale, cfg.dual_tolerance * scale);

    let mut rho = cfg.penalty;
    let mut w = vec![0.0; d];
    let mut u = vec![0.0; d];
    let mut y = project_lq_ball(&vec![0.0; b.len()], b, eta, q);
    let mut v = vec![0.0; b.len()];
    let mut objective = 0.0;
    let mut history = Vec::new();
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;
    let mut updates = 0;

    for k in 0..cfg.max_iterations {
        iterations = k + 1;
        let mut rhs: Vec<f64> = w.iter().zip(&u).map(|(a, c)| a - c).collect();
        let yv: Vec<f64> = y.iter().zip(&v).map(|(a, c)| a - c).collect();
        axpy(&mut rhs, 1.0, &transpose(&rows, &yv, d));
        let z = normal.solve(&rows, &rhs);
        let az = forward(&rows, &z);

        let z_hat: Vec<f64> = z.iter().zip(&w).map(|(a, c)| alpha * a + (1.0 - alpha) * c).collect();
        let y_hat: Vec<f64> = az.iter().zip(&y).map(|(a, c)| alpha * a + (1.0 - alpha) * c).collect();

        let arg: Vec<f64> = z_hat.iter().zip(&u).map(|(a, c)| a + c).collect();
        let (w_new, nuclear) = spectral_prox(n, &arg, 1.0 / rho, psd);
        let arg: Vec<f64> = y_hat.iter().zip(&v).map(|(a, c)| a + c).collect();
        let y_new = project_lq_ball(&arg, b, eta, q);

        for i in 0..d {
            u[i] += z_hat[i] - w_new[i];
        }
        for j in 0..v.len() {
            v[j] += y_hat[j] - y_new[j];
        }

        let pz: f64 = z.iter().zip(&w_new).map(|(a, c)| (a - c).powi(2)).sum();
        let py: f64 = az.iter().zip(&y_new).map(|(a, c)| (a - c).powi(2)).sum();
        primal = (pz + py).sqrt();
        let dy: Vec<f64> = y_new.iter().zip(&y).map(|(a, c)| a - c).collect();
        let mut ds = transpose(&rows, &dy, d);
        for i in 0..d {
            ds[i] += w_new[i] - w[i];
        }
        dual = rho * linalg::norm2(&ds);
        w = w_new;
        y = y_new;
        objective = nuclear;

        let record = IterationRecord {
            iteration: iterations,
            primal_residual: primal,
            dual_residual: dual,
            objective,
            penalty: rho,
        };
        progress(&record);
        history.push(record);

        if primal <= tol_p && dual <= tol_d && excess_misfit(&raw_rows, &w, &p.observations, p.noise_budget, q) <= tol_p {
            converged = true;
            break;
        }
        if cfg.adaptive_penalty && iterations % PENALTY_UPDATE_INTERVAL == 0 && updates < MAX_PENALTY_UPDATES {
            if let Some(f) = balance(primal, dual) {
                updates += 1;
                rho *= f;
                u.iter_mut().chain(v.iter_mut()).for_each(|x| *x /= f);
            }
        }
    }

    Ok(RecoveryResult {
        solution: linalg::from_coords(n, &w),
        objective,
        feasibility_residual: excess_misfit(&raw_rows, &w, &p.observations, p.noise_budget, q),
        iterations,
        converged,
        primal_residual: primal,
        dual_residual: dual,
        history,
    })
}

/// Noiseless variant: the `Z` step is the exact (least-squares) projection
/// onto `{A(Z) = b}`, so only the consensus constraint `Z = W` is dualized.
fn solve_equality(
    p: &RecoveryProblem,
    cfg: &SolverConfig,
    psd: bool,
    progress: &mut dyn FnMut(&IterationRecord),
    rows: &[Vec<f64>],
) -> Result<RecoveryResult> {
    let n = p.dim();
    let d = n * n;
    let proj = FidelityProjector::new(rows, &p.observations, 0.0, d);
    let alpha = cfg.over_relaxation;
    let scale = linalg::norm2(&p.observations).max(1.0);
    let (tol_p, tol_d) = (cfg.primal_tolerance * scale, cfg.dual_tolerance * scale);
    let q = p.noise_exponent;

    let mut rho = cfg.penalty;
    let mut w = vec![0.0; d];
    let mut u = vec![0.0; d];
    let mut objective = 0.0;
    let mut history = Vec::new();
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;
    let mut updates = 0;

    for k in 0..cfg.max_iterations {
        iterations = k + 1;
        let arg: Vec<f64> = w.iter().zip(&u).map(|(a, c)| a - c).collect();
        let z = proj.project(&arg);
        let z_hat: Vec<f64> = z.iter().zip(&w).map(|(a, c)| alpha * a + (1.0 - alpha) * c).collect();
        let arg: Vec<f64> = z_hat.iter().zip(&u).map(|(a, c)| a + c).collect();
        let (w_new, nuclear) = spectral_prox(n, &arg, 1.0 / rho, psd);
        for i in 0..d {
            u[i] += z_hat[i] - w_new[i];
        }
        primal = z.iter().zip(&w_new).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        dual = rho * w_new.iter().zip(&w).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        w = w_new;
        objective = nuclear;

        let record = IterationRecord {
            iteration: iterations,
            primal_residual: primal,
            dual_residual: dual,
            objective,
            penalty: rho,
        };
        progress(&record);
        history.push(record);

        if primal <= tol_p && dual <= tol_d && excess_misfit(rows, &w, &p.observations, 0.0, q) <= tol_p {
            converged = true;
            break;
        }
        if cfg.adaptive_penalty && iterations % PENALTY_UPDATE_INTERVAL == 0 && updates < MAX_PENALTY_UPDATES {
            if let Some(f) = balance(primal, dual) {
                updates += 1;
                rho *= f;
                u.iter_mut().for_each(|x| *x /= f);
            }
        }
    }

    Ok(RecoveryResult {
        solution: linalg::from_coords(n, &w),
        objective,
        feasibility_residual: excess_misfit(rows, &w, &p.observations, 0.0, q),
        iterations,
        converged,
        primal_residual: primal,
        dual_residual: dual,
        history,
    })
}

/// Penalty factor from residual balancing, if one residual exceeds the other tenfold.
fn balance(primal: f64, dual: f64) -> Option<f64> {
    if primal > 10.0 * dual {
        Some(2.0)
    } else if dual > 10.0 * primal {
        Some(0.5)
    } else {
        None
    }
}

/// Residual balancing runs at most this often and this many times, so the
/// penalty is eventually fixed and the fixed-penalty convergence theory applies.
const PENALTY_UPDATE_INTERVAL: usize = 10;
const MAX_PENALTY_UPDATES: usize = 30;

fn excess_misfit(rows: &[Vec<f64>], x: &[f64], b: &[f64], eta: f64, q: NormExponent) -> f64 {
    let diff: Vec<f64> = forward(rows, x).iter().zip(b).map(|(a, c)| a - c).collect();
    (q.norm(&diff) - eta).max(0.0)
}

/// Numerical rank: eigenvalues above `RANK_THRESHOLD * ||x||_inf`.
pub fn numerical_rank(x: &HermitianMatrix) -> usize {
    let eig = x.eig();
    let top = eig.eigenvalues().first().map_or(0.0, |l| l.abs());
    if top == 0.0 {
        return 0;
    }
    eig.eigenvalues()
        .iter()
        .filter(|l| l.abs() > RANK_THRESHOLD * top)
        .count()
}

#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub feasibility_residual: f64,
    pub misfit: f64,
    pub noise_budget: f64,
    pub rank: usize,
    pub history: Vec<IterationRecord>,
}

pub fn diagnostics(r: &RecoveryResult, p: &RecoveryProblem) -> Result<DiagnosticsReport> {
    Ok(DiagnosticsReport {
        converged: r.converged,
        iterations: r.iterations,
        objective: r.solution.norm(SchattenNorm::Nuclear),
        feasibility_residual: r.feasibility_residual,
        misfit: p.misfit(&r.solution)?,
        noise_budget: p.noise_budget,
        rank: numerical_rank(&r.solution),
        history: r.history.clone(),
    })
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "converged: {}", self.converged)?;
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "objective: {:e}", self.objective)?;
        writeln!(f, "misfit: {:e} (budget {:e})", self.misfit, self.noise_budget)?;
        writeln!(f, "feasibility_residual: {:e}", self.feasibility_residual)?;
        write!(f, "rank: {}", self.rank)?;
        if let Some(last) = self.history.last() {
            write!(
                f,
                "\nfinal residuals: primal {:e}, dual {:e}, penalty {:e}",
                last.primal_residual, last.dual_residual, last.penalty
            )?;
        }
        Ok(())
    }
}
