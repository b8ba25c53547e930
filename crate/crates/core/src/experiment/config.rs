//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. List-valued keys (`design`, `n`,
//! `r`, `m`, `noise`) accumulate across repeated lines, and a single line may
//! also hold a comma-separated list.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measurement::{NoiseShape, NormExponent};
use crate::solver::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    PhaseDiagram,
    NoiseSweep,
    DesignComparison,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::PhaseDiagram => "phase_diagram",
            ExperimentKind::NoiseSweep => "noise_sweep",
            ExperimentKind::DesignComparison => "design_comparison",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase_diagram" => Ok(ExperimentKind::PhaseDiagram),
            "noise_sweep" => Ok(ExperimentKind::NoiseSweep),
            "design_comparison" => Ok(ExperimentKind::DesignComparison),
            other => Err(Error::Config(format!("unknown experiment kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignSpec {
    /// Stabilizer states on `k` qubits.
    Stabilizer(usize),
    /// Haar-random unit vectors; the dimension comes from the grid unless fixed.
    Sphere(Option<usize>),
    File(PathBuf),
}

impl DesignSpec {
    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match self {
            DesignSpec::Stabilizer(k) => format!("stabilizer{k}"),
            DesignSpec::Sphere(_) => "sphere".into(),
            DesignSpec::File(p) => format!(
                "file:{}",
                p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())
            ),
        }
    }

    /// Dimension fixed by the design itself, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            DesignSpec::Stabilizer(k) => Some(1 << k),
            DesignSpec::Sphere(n) => *n,
            DesignSpec::File(_) => None,
        }
    }

    fn canonical(&self) -> String {
        match self {
            DesignSpec::Stabilizer(k) => format!("stabilizer {k}"),
            DesignSpec::Sphere(Some(n)) => format!("sphere {n}"),
            DesignSpec::Sphere(None) => "sphere".into(),
            DesignSpec::File(p) => format!("file {}", p.display()),
        }
    }
}

impl FromStr for DesignSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().unwrap_or("");
        let arg = parts.next();
        if parts.next().is_some() {
            return Err(Error::Config(format!("too many tokens in design `{s}`")));
        }
        match (kind, arg) {
            ("stabilizer", Some(k)) => Ok(DesignSpec::Stabilizer(parse_num(k, "stabilizer qubits")?)),
            ("sphere", None) => Ok(DesignSpec::Sphere(None)),
            ("sphere", Some(n)) => Ok(DesignSpec::Sphere(Some(parse_num(n, "sphere dimension")?))),
            ("file", Some(p)) => Ok(DesignSpec::File(PathBuf::from(p))),
            _ => Err(Error::Config(format!(
                "design must be `stabilizer k`, `sphere [n]` or `file path`, got `{s}`"
            ))),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid {what} `{s}`")))
}

fn parse_bool(s: &str, what: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid {what} `{s}` (expected true/false)"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub designs: Vec<DesignSpec>,
    pub n: Vec<usize>,
    pub r: Vec<usize>,
    pub m: Vec<usize>,
    pub trials: usize,
    pub noise: Vec<(f64, NormExponent)>,
    pub noise_shape: NoiseShape,
    pub seed: u64,
    pub success_threshold: f64,
    pub psd: bool,
    /// Record wall-clock time in the report (breaks byte-identical reruns).
    pub timing: bool,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::PhaseDiagram,
            designs: Vec::new(),
            n: Vec::new(),
            r: vec![1],
            m: Vec::new(),
            trials: 20,
            noise: vec![(0.0, NormExponent::Two)],
            noise_shape: NoiseShape::GaussianRescaled,
            seed: 0,
            success_threshold: 1e-3,
            psd: false,
            timing: false,
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let (mut r_set, mut noise_set) = (false, false);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {lineno}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = |e: Error| match e {
                Error::Config(msg) => Error::Config(format!("line {lineno}: {msg}")),
                other => other,
            };
            let items = || value.split(',').map(str::trim).filter(|s| !s.is_empty());
            match key {
                "kind" => cfg.kind = value.parse().map_err(ctx)?,
                "design" => {
                    for item in items() {
                        cfg.designs.push(item.parse().map_err(ctx)?);
                    }
                }
                "n" => {
                    for item in items() {
                        cfg.n.push(parse_num(item, "n").map_err(ctx)?);
                    }
                }
                "r" => {
                    if !r_set {
                        cfg.r.clear();
                        r_set = true;
                    }
                    for item in items() {
                        cfg.r.push(parse_num(item, "r").map_err(ctx)?);
                    }
                }
                "m" => {
                    for item in items() {
                        cfg.m.push(parse_num(item, "m").map_err(ctx)?);
                    }
                }
                "noise" => {
                    if !noise_set {
                        cfg.noise.clear();
                        noise_set = true;
                    }
                    for item in items() {
                        let mut parts = item.split_whitespace();
                        let eta: f64 = parse_num(parts.next().unwrap_or(""), "noise level").map_err(ctx)?;
                        let q = match parts.next() {
                            Some(q) => q.parse().map_err(|_| ctx(Error::Config(format!("invalid exponent `{q}`"))))?,
                            None => NormExponent::Two,
                        };
                        if parts.next().is_some() {
                            return Err(ctx(Error::Config("noise takes `eta [q]`".into())));
                        }
                        cfg.noise.push((eta, q));
                    }
                }
                "noise_shape" => {
                    cfg.noise_shape = value.parse().map_err(|e: Error| ctx(Error::Config(e.to_string())))?
                }
                "trials" => cfg.trials = parse_num(value, "trials").map_err(ctx)?,
                "seed" => cfg.seed = parse_num(value, "seed").map_err(ctx)?,
                "success_threshold" => cfg.success_threshold = parse_num(value, "success_threshold").map_err(ctx)?,
                "psd" => cfg.psd = parse_bool(value, "psd").map_err(ctx)?,
                "timing" => cfg.timing = parse_bool(value, "timing").map_err(ctx)?,
                "solver.max_iterations" => cfg.solver.max_iterations = parse_num(value, key).map_err(ctx)?,
                "solver.primal_tolerance" => cfg.solver.primal_tolerance = parse_num(value, key).map_err(ctx)?,
                "solver.dual_tolerance" => cfg.solver.dual_tolerance = parse_num(value, key).map_err(ctx)?,
                "solver.tolerance" => {
                    let t = parse_num(value, key).map_err(ctx)?;
                    cfg.solver.primal_tolerance = t;
                    cfg.solver.dual_tolerance = t;
                }
                "solver.penalty" => cfg.solver.penalty = parse_num(value, key).map_err(ctx)?,
                "solver.over_relaxation" => cfg.solver.over_relaxation = parse_num(value, key).map_err(ctx)?,
                "solver.adaptive_penalty" => cfg.solver.adaptive_penalty = parse_bool(value, key).map_err(ctx)?,
                other => return Err(Error::Config(format!("line {lineno}: unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.designs.is_empty() {
            return Err(Error::Config("at least one `design` is required".into()));
        }
        if self.kind == ExperimentKind::DesignComparison && self.designs.len() < 2 {
            return Err(Error::Config("design_comparison needs at least two designs".into()));
        }
        if self.m.is_empty() {
            return Err(Error::Config("at least one `m` is required".into()));
        }
        if self.n.is_empty() && self.designs.iter().any(|d| matches!(d, DesignSpec::Sphere(None))) {
            return Err(Error::Config("`n` is required for `sphere` without a dimension".into()));
        }
        if self.n.iter().chain(&self.r).chain(&self.m).any(|v| *v == 0) {
            return Err(Error::Config("grid values must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::Config("success_threshold must be positive".into()));
        }
        if self.noise.iter().any(|(eta, _)| !(*eta >= 0.0) || !eta.is_finite()) {
            return Err(Error::Config("noise levels must be finite and >= 0".into()));
        }
        if self.kind == ExperimentKind::NoiseSweep {
            let levels = self.noise.len();
            if levels < 5 || !self.noise.iter().any(|(eta, _)| *eta == 0.0) {
                return Err(Error::Config("noise_sweep needs at least 5 noise levels including 0".into()));
            }
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(format!("solver: {e}")))
    }

    /// Deterministic re-serialization; the basis of the config hash.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = {}", self.kind.as_str());
        for d in &self.designs {
            let _ = writeln!(s, "design = {}", d.canonical());
        }
        for (key, list) in [("n", &self.n), ("r", &self.r), ("m", &self.m)] {
            for v in list {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        for (eta, q) in &self.noise {
            let _ = writeln!(s, "noise = {eta:e} {q}");
        }
        let shape = match self.noise_shape {
            NoiseShape::AdversarialUniform => "adversarial_uniform",
            NoiseShape::GaussianRescaled => "gaussian_rescaled",
        };
        let _ = writeln!(s, "noise_shape = {shape}");
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "success_threshold = {:e}", self.success_threshold);
        let _ = writeln!(s, "psd = {}", self.psd);
        let _ = writeln!(s, "timing = {}", self.timing);
        let c = &self.solver;
        let _ = writeln!(s, "solver.max_iterations = {}", c.max_iterations);
        let _ = writeln!(s, "solver.primal_tolerance = {:e}", c.primal_tolerance);
        let _ = writeln!(s, "solver.dual_tolerance = {:e}", c.dual_tolerance);
        let _ = writeln!(s, "solver.penalty = {:e}", c.penalty);
        let _ = writeln!(s, "solver.over_relaxation = {:e}", c.over_relaxation);
        let _ = writeln!(s, "solver.adaptive_penalty = {}", c.adaptive_penalty);
        s
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
