use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use designlift::designs::{
    certify, load_design, save_design, sphere_sampler, stabilizer_design, super_normalize, write_design,
    AccuracyMethod, AccuracyNorm, Design, design_accuracy,
};
use designlift::experiment::{run_experiment, run_experiment_with_threads, random_low_rank, ExperimentConfig};
use designlift::hermitian::io::{save_hmat};
use designlift::measurement::{
    load_problem, sample_ensemble, save_ensemble, save_observations, simulate_measurements, EnsembleSource,
    NoiseShape, NormExponent,
};
use designlift::solver::{diagnostics, recover, recover_psd, SolverConfig};
use designlift::theory::{run_suite, save_theory_report, Suite, SuiteOptions};
use designlift::{rng, Result};

#[derive(Parser)]
#[command(name = "designlift", version, about = "Low-rank recovery from 3-design measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or certify designs.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Sample an ensemble and noisy observations of a random low-rank matrix.
    Simulate(SimulateArgs),
    /// Nuclear-norm recovery from an ensemble and observations.
    Recover(RecoverArgs),
    /// Run a theory check suite against a design.
    VerifyTheory(VerifyTheoryArgs),
    /// Run a config-driven recovery experiment.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Write a design file (stdout unless --out).
    Build(BuildArgs),
    /// Certify a design's accuracy; exit 0 iff theta <= tol.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Stabilizer states on k qubits.
    #[arg(long)]
    stabilizer: Option<usize>,
    /// Haar-random vectors in dimension n.
    #[arg(long)]
    sphere: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Vector count for --sphere.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    super_normalized: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// `1` or `inf`.
    #[arg(long, default_value = "inf")]
    norm: AccuracyNorm,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Dense tensor-power deviation.
    #[arg(long, conflicts_with = "power")]
    dense: bool,
    /// Matrix-free power iteration (operator norm only).
    #[arg(long)]
    power: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with_all = ["stabilizer", "sphere"])]
    design: Option<PathBuf>,
    #[arg(long, conflicts_with = "sphere")]
    stabilizer: Option<usize>,
    #[arg(long)]
    sphere: Option<usize>,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long)]
    psd: bool,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// `1`, `2` or `inf`.
    #[arg(long, default_value = "2")]
    q: NormExponent,
    #[arg(long, default_value = "gaussian_rescaled")]
    noise_shape: NoiseShape,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    obs: PathBuf,
    /// Where to write the ground truth.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    obs: PathBuf,
    #[arg(long)]
    psd: bool,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyTheoryArgs {
    #[arg(long, required_unless_present = "stabilizer")]
    design: Option<PathBuf>,
    #[arg(long, conflicts_with = "design")]
    stabilizer: Option<usize>,
    /// moments, smallball, pz, wm, nsp or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    /// Measurements for the wm and nsp suites (default 2 n^2).
    #[arg(long)]
    m: Option<usize>,
    /// NSP constant (default: 1 / smallest singular value of the ensemble).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

fn build(args: &BuildArgs) -> Result<ExitCode> {
    let mut d = match (args.source.stabilizer, args.source.sphere) {
        (Some(k), _) => stabilizer_design(k)?,
        (_, Some(n)) => Design::uniform(n, sphere_sampler(n, args.seed)?.take(args.count).collect())?,
        _ => unreachable!("clap enforces one source"),
    };
    if args.super_normalized {
        d = super_normalize(&d)?;
    }
    match &args.out {
        Some(path) => {
            save_design(path, &d)?;
            eprintln!("wrote {} vectors in dimension {} to {}", d.len(), d.dim(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_design(&mut lock, &d).and_then(|_| lock.flush()).map_err(|e| designlift::Error::Io {
                path: "<stdout>".into(),
                source: e,
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let d = load_design(&args.file)?;
    let method = if args.dense {
        AccuracyMethod::Dense
    } else if args.power {
        AccuracyMethod::power_iteration()
    } else {
        AccuracyMethod::SymmetricSubspace
    };
    let theta = design_accuracy(&d, args.t, args.norm, method)?;
    let cert = certify(&d, 1, AccuracyMethod::SymmetricSubspace)?;
    println!("t = {}  norm = {:?}  method = {}", args.t, args.norm, method.name());
    println!("theta = {theta:e}  tol = {:e}  frame deviation = {:e}", args.tol, cert.frame_deviation);
    let ok = theta <= args.tol;
    println!("{}", if ok { "within tolerance" } else { "exceeds tolerance" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let design = match (&args.design, args.stabilizer) {
        (Some(p), _) => Some(load_design(p)?),
        (_, Some(k)) => Some(stabilizer_design(k)?),
        _ => None,
    };
    let source = match (&design, args.sphere) {
        (Some(d), _) => EnsembleSource::Design(d),
        (None, Some(n)) => EnsembleSource::Sphere(n),
        (None, None) => {
            return Err(designlift::Error::Parameter(
                "one of --design, --stabilizer or --sphere is required".into(),
            ))
        }
    };
    let n = match source {
        EnsembleSource::Design(d) => d.dim(),
        EnsembleSource::Sphere(n) => n,
    };
    let x = random_low_rank(n, args.rank, args.psd, rng::derive_seed(args.seed, &[0]))?;
    let e = sample_ensemble(source, args.m, rng::derive_seed(args.seed, &[1]))?;
    let p = simulate_measurements(&e, &x, args.eta, args.q, args.noise_shape, rng::derive_seed(args.seed, &[2]))?;
    save_ensemble(&args.ensemble, &e)?;
    save_observations(&args.obs, &p)?;
    if let Some(t) = &args.truth {
        save_hmat(t, &x)?;
    }
    eprintln!("simulated m = {} measurements in dimension {n} (eta = {}, q = {})", args.m, args.eta, args.q);
    Ok(ExitCode::SUCCESS)
}

fn recover_cmd(args: &RecoverArgs) -> Result<ExitCode> {
    let p = load_problem(&args.ensemble, &args.obs)?;
    let cfg = SolverConfig {
        max_iterations: args.max_iter,
        primal_tolerance: args.tol,
        dual_tolerance: args.tol,
        ..SolverConfig::default()
    };
    let result = if args.psd { recover_psd(&p, &cfg)? } else { recover(&p, &cfg)? };
    save_hmat(&args.out, &result.solution)?;
    println!("{}", diagnostics(&result, &p)?);
    Ok(if result.converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn verify_theory(args: &VerifyTheoryArgs) -> Result<ExitCode> {
    let d = match (&args.design, args.stabilizer) {
        (Some(p), _) => load_design(p)?,
        (_, Some(k)) => stabilizer_design(k)?,
        _ => unreachable!("clap enforces a design"),
    };
    let opts = SuiteOptions {
        samples: args.samples,
        seed: args.seed,
        rho: args.rho,
        rank: args.rank,
        theta: args.theta,
        m: args.m,
        tau: args.tau,
        ..SuiteOptions::default()
    };
    let rows = run_suite(&d, args.suite, &opts)?;
    save_theory_report(&args.report, &rows)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} checks, {failed} failed; report written to {}", rows.len(), args.report.display());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn experiment(args: &ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Ok(s) = std::env::var("DESIGNLIFT_SEED") {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| designlift::Error::Config(format!("DESIGNLIFT_SEED `{s}` is not an integer")))?;
    }
    let base = args.config.parent().filter(|p| !p.as_os_str().is_empty()).map(Path::to_path_buf);
    let report = match args.threads {
        Some(t) => run_experiment_with_threads(&cfg, base.as_deref(), t)?,
        None => run_experiment(&cfg, base.as_deref())?,
    };
    for path in report.save(&args.out)? {
        eprintln!("wrote {}", path.display());
    }
    if report.has_mostly_nonconverged() {
        eprintln!("some cells failed to converge in at least half their trials");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Design(DesignCommand::Build(a)) => build(a),
        Command::Design(DesignCommand::Verify(a)) => verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Recover(a) => recover_cmd(a),
        Command::VerifyTheory(a) => verify_theory(a),
        Command::Experiment(a) => experiment(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
