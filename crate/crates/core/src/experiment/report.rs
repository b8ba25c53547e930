//! Aggregated cell results and their CSV encodings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::measurement::NormExponent;

use super::config::{ExperimentConfig, ExperimentKind};
use super::TrialOutcome;

pub const REPORT_HEADER: &str = "n,r,m,eta,q,design,trials,success_rate,median_rel_error,mean_iters,wall_ms";
pub const QUANTILE_HEADER: &str = "n,r,m,eta,q,design,q25_rel_error,median_rel_error,q75_rel_error,nonconverged_fraction";
pub const FIT_HEADER: &str = "n,r,m,q,design,levels,floor,slope,intercept,correlation";

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub design: String,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub eta: f64,
    pub q: NormExponent,
    pub trials: usize,
    pub success_rate: f64,
    pub median_rel_error: f64,
    pub q25_rel_error: f64,
    pub q75_rel_error: f64,
    pub mean_iters: f64,
    /// Total wall time of the cell's trials; zero unless timing is enabled.
    pub wall_ms: u64,
    pub nonconverged_fraction: f64,
    pub errors: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl CellResult {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_trials(
        design: &str,
        n: usize,
        r: usize,
        m: usize,
        eta: f64,
        q: NormExponent,
        trials: &[TrialOutcome],
        cfg: &ExperimentConfig,
    ) -> Self {
        let k = trials.len() as f64;
        let errors: Vec<f64> = trials.iter().map(|t| t.relative_error).collect();
        let mut sorted = errors.clone();
        sorted.sort_by(f64::total_cmp);
        let successes = errors.iter().filter(|e| **e <= cfg.success_threshold).count();
        let wall = if cfg.timing { trials.iter().map(|t| t.wall_ms).sum::<f64>().round() as u64 } else { 0 };
        Self {
            design: design.to_owned(),
            n,
            r,
            m,
            eta,
            q,
            trials: trials.len(),
            success_rate: successes as f64 / k,
            median_rel_error: quantile(&sorted, 0.5),
            q25_rel_error: quantile(&sorted, 0.25),
            q75_rel_error: quantile(&sorted, 0.75),
            mean_iters: trials.iter().map(|t| t.iterations as f64).sum::<f64>() / k,
            wall_ms: wall,
            nonconverged_fraction: trials.iter().filter(|t| !t.converged).count() as f64 / k,
            errors,
        }
    }
}

/// Linear fit of median error against noise level for one `(design, n, r, m, q)` group.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseFit {
    pub design: String,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub q: NormExponent,
    pub levels: usize,
    /// Median error at `eta = 0`.
    pub floor: f64,
    /// Least-squares slope of `error - floor` against `eta`, through the origin.
    pub slope: f64,
    /// Ordinary least-squares intercept minus the floor.
    pub intercept: f64,
    /// Pearson correlation between `eta` and median error.
    pub correlation: f64,
}

fn fit_group(cells: &[&CellResult]) -> Option<NoiseFit> {
    let floor = cells.iter().find(|c| c.eta == 0.0)?.median_rel_error;
    if cells.len() < 2 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = cells.iter().map(|c| (c.eta, c.median_rel_error)).unzip();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let slope = xs.iter().zip(&ys).map(|(x, y)| x * (y - floor)).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let c = cells[0];
    Some(NoiseFit {
        design: c.design.clone(),
        n: c.n,
        r: c.r,
        m: c.m,
        q: c.q,
        levels: cells.len(),
        floor,
        slope,
        intercept: my - b * mx - floor,
        correlation: sxy / (sxx * syy).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
    /// Filled for noise sweeps only.
    pub fits: Vec<NoiseFit>,
}

impl ExperimentReport {
    pub(crate) fn new(config: ExperimentConfig, cells: Vec<CellResult>) -> Self {
        let mut fits = Vec::new();
        if config.kind == ExperimentKind::NoiseSweep {
            let mut seen: Vec<(String, usize, usize, usize, NormExponent)> = Vec::new();
            for c in &cells {
                let key = (c.design.clone(), c.n, c.r, c.m, c.q);
                if seen.contains(&key) {
                    continue;
                }
                let group: Vec<&CellResult> = cells
                    .iter()
                    .filter(|o| (&o.design, o.n, o.r, o.m, o.q) == (&key.0, key.1, key.2, key.3, key.4))
                    .collect();
                fits.extend(fit_group(&group));
                seen.push(key);
            }
        }
        Self { config, cells, fits }
    }

    /// True when some cell failed to converge in at least half its trials.
    pub fn has_mostly_nonconverged(&self) -> bool {
        self.cells.iter().any(|c| c.nonconverged_fraction >= 0.5)
    }

    pub fn manifest(&self) -> String {
        format!(
            "# designlift experiment kind={} seed={} config_hash={} version={}",
            self.config.kind.as_str(),
            self.config.seed,
            self.config.hash(),
            env!("CARGO_PKG_VERSION")
        )
    }

    /// Manifest comment line, header, then one row per cell.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n{REPORT_HEADER}\n", self.manifest());
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{:e},{},{}",
                c.n, c.r, c.m, c.eta, c.q, c.design, c.trials, c.success_rate, c.median_rel_error, c.mean_iters, c.wall_ms
            );
        }
        s
    }

    pub fn quantiles_csv(&self) -> String {
        let mut s = format!("{}\n{QUANTILE_HEADER}\n", self.manifest());
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:e},{:e},{:e},{}",
                c.n, c.r, c.m, c.eta, c.q, c.design, c.q25_rel_error, c.median_rel_error, c.q75_rel_error, c.nonconverged_fraction
            );
        }
        s
    }

    pub fn fits_csv(&self) -> String {
        let mut s = format!("{}\n{FIT_HEADER}\n", self.manifest());
        for f in &self.fits {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:e},{:e},{:e},{}",
                f.n, f.r, f.m, f.q, f.design, f.levels, f.floor, f.slope, f.intercept, f.correlation
            );
        }
        s
    }

    /// Writes the report to `path`, the quantiles to `<path>.quantiles.csv`
    /// and, for noise sweeps, the fits to `<path>.fit.csv`. Returns every path written.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let path = path.as_ref();
        let sidecar = |suffix: &str| {
            let mut p = path.as_os_str().to_owned();
            p.push(suffix);
            PathBuf::from(p)
        };
        let mut files = vec![(path.to_path_buf(), self.to_csv()), (sidecar(".quantiles.csv"), self.quantiles_csv())];
        if self.config.kind == ExperimentKind::NoiseSweep {
            files.push((sidecar(".fit.csv"), self.fits_csv()));
        }
        for (p, text) in &files {
            fs::write(p, text).map_err(|e| Error::io(p, e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
