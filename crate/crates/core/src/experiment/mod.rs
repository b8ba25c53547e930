//! Seeded, parallel recovery experiments: phase diagrams over `(n, r, m)`,
//! noise sweeps, and design comparisons.
//!
//! Every trial draws its ground truth, ensemble and noise from a seed derived
//! from the master seed and the trial's position in the grid, so reports are
//! reproducible regardless of thread count. Trials that differ only along the
//! compared axis (noise level in a sweep, design in a comparison) share their
//! seed, giving paired comparisons.

mod config;
mod report;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::designs::{load_design, stabilizer_design, Design};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::measurement::{sample_ensemble, simulate_measurements, EnsembleSource, NormExponent};
use crate::rng;
use crate::solver::{recover, recover_psd};

pub use config::{DesignSpec, ExperimentConfig, ExperimentKind};
pub use report::{CellResult, ExperimentReport, NoiseFit};

/// Random rank-`r` Hermitian matrix with unit Frobenius norm: Haar eigenbasis
/// and Gaussian eigenvalues (absolute values when `psd`).
pub fn random_low_rank(n: usize, r: usize, psd: bool, seed: u64) -> Result<HermitianMatrix> {
    if r == 0 || r > n {
        return Err(Error::param(format!("rank {r} outside 1..={n}")));
    }
    let mut g = rng::seeded(seed);
    let basis = rng::haar_unitary_columns(&mut g, n);
    let mut spectrum = vec![0.0; n];
    for s in spectrum.iter_mut().take(r) {
        let x = rng::standard_normal(&mut g);
        *s = if psd { x.abs() } else { x };
    }
    let norm = spectrum.iter().map(|x| x * x).sum::<f64>().sqrt();
    spectrum.iter_mut().for_each(|x| *x /= norm);
    Ok(HermitianMatrix::from_spectrum(&spectrum, &basis))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub relative_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_ms: f64,
}

struct LoadedDesign {
    label: String,
    design: Option<Design>,
    dims: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Cell {
    design: usize,
    n: usize,
    r: usize,
    m: usize,
    noise: usize,
}

fn load_designs(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<Vec<LoadedDesign>> {
    cfg.designs
        .iter()
        .map(|spec| {
            let design = match spec {
                DesignSpec::Stabilizer(k) => Some(stabilizer_design(*k)?),
                DesignSpec::Sphere(_) => None,
                DesignSpec::File(p) => {
                    let path = match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p.clone(),
                    };
                    Some(load_design(path)?)
                }
            };
            let fixed = design.as_ref().map(Design::dim).or(spec.fixed_dim());
            let dims = match fixed {
                Some(d) if cfg.n.is_empty() || cfg.n.contains(&d) => vec![d],
                Some(d) => {
                    return Err(Error::Config(format!(
                        "design `{}` has dimension {d}, which is not in the n grid {:?}",
                        spec.label(),
                        cfg.n
                    )))
                }
                None => cfg.n.clone(),
            };
            Ok(LoadedDesign {
                label: spec.label(),
                design,
                dims,
            })
        })
        .collect()
}

fn cells(cfg: &ExperimentConfig, designs: &[LoadedDesign]) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for (di, d) in designs.iter().enumerate() {
        for &n in &d.dims {
            for &r in &cfg.r {
                if r > n {
                    return Err(Error::Config(format!("rank {r} exceeds dimension {n}")));
                }
                for &m in &cfg.m {
                    for noise in 0..cfg.noise.len() {
                        out.push(Cell { design: di, n, r, m, noise });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn trial_seed(cfg: &ExperimentConfig, c: &Cell, trial: usize) -> u64 {
    let design = if cfg.kind == ExperimentKind::DesignComparison { 0 } else { c.design as u64 };
    let noise = if cfg.kind == ExperimentKind::NoiseSweep { 0 } else { c.noise as u64 };
    rng::derive_seed(cfg.seed, &[design, c.n as u64, c.r as u64, c.m as u64, noise, trial as u64])
}

/// One recovery trial: ground truth, ensemble and noise are all derived from `seed`.
pub fn run_trial(
    source: EnsembleSource<'_>,
    r: usize,
    m: usize,
    eta: f64,
    q: NormExponent,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<TrialOutcome> {
    let start = Instant::now();
    let n = match source {
        EnsembleSource::Design(d) => d.dim(),
        EnsembleSource::Sphere(n) => n,
    };
    let x = random_low_rank(n, r, cfg.psd, rng::derive_seed(seed, &[0]))?;
    let e = sample_ensemble(source, m, rng::derive_seed(seed, &[1]))?;
    let p = simulate_measurements(&e, &x, eta, q, cfg.noise_shape, rng::derive_seed(seed, &[2]))?;
    let result = if cfg.psd { recover_psd(&p, &cfg.solver)? } else { recover(&p, &cfg.solver)? };
    Ok(TrialOutcome {
        relative_error: (&result.solution - &x).frobenius_norm() / x.frobenius_norm(),
        iterations: result.iterations,
        converged: result.converged,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every cell of the grid; relative `file` design paths resolve against `base`.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let designs = load_designs(cfg, base)?;
    let grid = cells(cfg, &designs)?;
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(ci, t)| {
            let c = &grid[ci];
            let source = match &designs[c.design].design {
                Some(d) => EnsembleSource::Design(d),
                None => EnsembleSource::Sphere(c.n),
            };
            let (eta, q) = cfg.noise[c.noise];
            run_trial(source, c.r, c.m, eta, q, cfg, trial_seed(cfg, c, t))
        })
        .collect::<Result<Vec<_>>>()?;

    let results = grid
        .iter()
        .zip(outcomes.chunks(cfg.trials))
        .map(|(c, trials)| {
            let (eta, q) = cfg.noise[c.noise];
            CellResult::from_trials(&designs[c.design].label, c.n, c.r, c.m, eta, q, trials, cfg)
        })
        .collect();
    Ok(ExperimentReport::new(cfg.clone(), results))
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    cfg: &ExperimentConfig,
    base: Option<&Path>,
    threads: usize,
) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg, base))
}

fn run_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<ExperimentReport> {
    let cfg = ExperimentConfig { kind, ..cfg.clone() };
    run_experiment(&cfg, None)
}

pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_kind(cfg, ExperimentKind::PhaseDiagram)
}

pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_kind(cfg, ExperimentKind::NoiseSweep)
}

pub fn run_design_comparison(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_kind(cfg, ExperimentKind::DesignComparison)
}
