//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test --test acceptance` (release profile recommended).

use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use designlift::designs::{design_accuracy, stabilizer_design, AccuracyMethod, AccuracyNorm, Design};
use designlift::experiment::{random_low_rank, run_experiment, ExperimentConfig};
use designlift::hermitian::sym3_trace;
use designlift::measurement::{sample_ensemble, simulate_measurements, EnsembleSource, NoiseShape, NormExponent};
use designlift::solver::{recover, SolverConfig};
use designlift::theory::{
    cone_samples, exact_moment, extremal_candidates, paley_zygmund_check, small_ball_exact,
    third_moment_bound_check, wm_estimate, FiniteDistribution,
};
use designlift::{rng, HermitianMatrix};

type Outcome = Result<String, String>;

fn random_hermitian(n: usize, r: &mut rng::Rng) -> HermitianMatrix {
    let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(r)).collect();
    HermitianMatrix::symmetrized(n, data)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: designlift::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn kron(a: &[Complex64], na: usize, b: &[Complex64], nb: usize) -> Vec<Complex64> {
    let n = na * nb;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + j * nb + l] = a[i * na + j] * b[k * nb + l];
                }
            }
        }
    }
    out
}

/// Dense `(1/6) sum_pi P_pi` on `(C^n)^{⊗3}`.
fn dense_sym3(n: usize) -> Vec<f64> {
    let d = n * n * n;
    let mut p = vec![0.0; d * d];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let idx = [a, b, c];
                let col = (a * n + b) * n + c;
                for pi in perms {
                    let row = (idx[pi[0]] * n + idx[pi[1]]) * n + idx[pi[2]];
                    p[row * d + col] += 1.0 / 6.0;
                }
            }
        }
    }
    p
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut g = rng::seeded(101);
    for n in 2..=5 {
        let p = dense_sym3(n);
        let d = n * n * n;
        for _ in 0..100 {
            let (x, y, z) = (random_hermitian(n, &mut g), random_hermitian(n, &mut g), random_hermitian(n, &mut g));
            let k = kron(&kron(x.entries(), n, y.entries(), n), n * n, z.entries(), n);
            let mut oracle = Complex64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    oracle += p[i * d + j] * k[j * d + i];
                }
            }
            let got = lib(sym3_trace(&x, &y, &z))?;
            worst = worst.max((got - oracle.re).abs()).max(oracle.im.abs());
        }
    }
    check(worst <= 1e-8, format!("max |sym3_trace - kronecker oracle| = {worst:.2e} over 400 triples"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let d = lib(stabilizer_design(k))?;
        let method = if k == 3 { AccuracyMethod::power_iteration() } else { AccuracyMethod::SymmetricSubspace };
        for t in 1..=3 {
            worst = worst.max(lib(design_accuracy(&d, t, AccuracyNorm::Inf, method))?);
        }
    }
    let t4 = lib(design_accuracy(&lib(stabilizer_design(1))?, 4, AccuracyNorm::Inf, AccuracyMethod::Dense))?;
    check(
        worst <= 1e-9 && t4 > 1e-3,
        format!("max theta_inf (k=1..3, t=1..3) = {worst:.2e}; k=1 at t=4: {t4:.3}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut g = rng::seeded(303);
    for k in 1..=3 {
        let d = lib(stabilizer_design(k))?;
        let n = d.dim();
        for _ in 0..50 {
            let z = random_hermitian(n, &mut g);
            let tr: f64 = (0..n).map(|i| z.get(i, i).re).sum();
            let tr_sq: f64 = z.entries().iter().map(|e| e.norm_sqr()).sum();
            let expected = tr * tr + tr_sq;
            let got = lib(exact_moment(&d, &z, 2))?;
            worst = worst.max((got - expected).abs());
        }
    }
    check(worst <= 1e-9, format!("max |E tr(AZ)^2 - (tr(Z)^2 + tr(Z^2))| = {worst:.2e}"))
}

fn cone_battery(d: &Design) -> Result<Vec<designlift::theory::ConeSample>, String> {
    let mut all = Vec::new();
    for (i, r) in [1usize, 2].into_iter().enumerate() {
        for (j, rho) in [0.3, 0.5, 0.8].into_iter().enumerate() {
            let seed = rng::derive_seed(404, &[i as u64, j as u64]);
            all.extend(lib(cone_samples(d.dim(), r, rho, 200, seed))?);
            all.extend(lib(extremal_candidates(d.dim(), r, rho, 4, seed))?);
        }
    }
    Ok(all)
}

fn criterion_4(d: &Design) -> Outcome {
    let samples = cone_battery(d)?;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for s in &samples {
        let kappa_sq = 1.0 + (1.0 + 1.0 / s.rho).powi(2);
        for step in 0..10 {
            let theta = step as f64 / 10.0;
            let bound = (1.0 - theta * theta).powi(3) / (36.0 * kappa_sq * s.rank_param as f64);
            let q = lib(small_ball_exact(d, &s.matrix, theta))?;
            min_slack = min_slack.min(q - bound);
            if q < bound {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!("{violations} violations over {} samples x 10 thetas; min slack {min_slack:.3e}", samples.len()),
    )
}

fn criterion_5(d: &Design) -> Outcome {
    let samples = cone_battery(d)?;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for s in &samples {
        let c = lib(third_moment_bound_check(d, s))?;
        let kappa = (1.0 + (1.0 + 1.0 / s.rho).powi(2)).sqrt();
        let tr = s.matrix.trace();
        let bound = 6.0 * kappa * (s.rank_param as f64).sqrt() * (tr * tr).max(1.0);
        if (c.rhs - bound).abs() > 1e-12 * bound || c.lhs > bound + 1e-9 {
            violations += 1;
        }
        min_slack = min_slack.min(bound - c.lhs);
    }
    check(
        violations == 0,
        format!("{violations} violations over {} cone samples; min slack {min_slack:.3e}", samples.len()),
    )
}

fn criterion_6() -> Outcome {
    use rand::Rng as _;
    let mut g = rng::seeded(606);
    let mut violations = 0;
    let mut checks = 0;
    for _ in 0..1000 {
        let size = g.random_range(1..=64);
        let values: Vec<f64> = (0..size)
            .map(|_| if g.random::<f64>() < 0.2 { 0.0 } else { rng::standard_normal(&mut g).powi(2) * g.random::<f64>() * 5.0 })
            .collect();
        let raw: Vec<f64> = (0..size).map(|_| g.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // Independent evaluation alongside the library check.
        let mean: f64 = values.iter().zip(&weights).map(|(v, w)| v * w).sum();
        let dist = lib(FiniteDistribution::new(values.clone(), weights.clone()))?;
        for p in [1.5, 2.0, 3.0] {
            let mp: f64 = values.iter().zip(&weights).map(|(v, w)| v.powf(p) * w).sum();
            for step in 0..10 {
                let theta = step as f64 / 10.0;
                let tail: f64 = values.iter().zip(&weights).filter(|(v, _)| **v > theta * mean).map(|(_, w)| w).sum();
                let e = p / (p - 1.0);
                let rhs = if mean == 0.0 { 0.0 } else { (1.0 - theta).powf(e) * mean.powf(e) / mp.powf(1.0 / (p - 1.0)) };
                let c = lib(paley_zygmund_check(&dist, p, theta))?;
                checks += 1;
                if tail < rhs - 1e-12 || !c.pass {
                    violations += 1;
                }
            }
        }
    }
    check(violations == 0, format!("{violations} violations over {checks} (distribution, p, theta) checks"))
}

fn criterion_7(d: &Design) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for m in [50, 200] {
        let est = lib(wm_estimate(EnsembleSource::Design(d), m, 500, 707 + m as u64, 1, 0.5))?;
        let n = d.dim() as f64;
        let bound = 3.1049 * (n * (2.0 * n).ln()).sqrt() + 2.0 * est.standard_error;
        ok &= est.mean_h_norm <= bound;
        lines.push(format!("m={m}: E||H|| = {:.4} (SE {:.4}) vs {:.4}", est.mean_h_norm, est.standard_error, bound));
    }
    check(ok, lines.join("; "))
}

/// Solves `A(X) = b` for Hermitian `X` as a real `n^2 x n^2` linear system.
fn linear_system_oracle(vectors: &[Vec<Complex64>], scaling: f64, b: &[f64], n: usize) -> HermitianMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n * n];
            if i == j {
                e[i * n + i] = Complex64::new(1.0, 0.0);
                basis.push(e);
            } else {
                e[i * n + j] = Complex64::new(1.0, 0.0);
                e[j * n + i] = Complex64::new(1.0, 0.0);
                basis.push(e.clone());
                e[i * n + j] = Complex64::new(0.0, 1.0);
                e[j * n + i] = Complex64::new(0.0, -1.0);
                basis.push(e);
            }
        }
    }
    let m = vectors.len();
    let mut a = DMatrix::<f64>::zeros(m, basis.len());
    for (row, v) in vectors.iter().enumerate() {
        for (col, e) in basis.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    s += v[i].conj() * e[i * n + j] * v[j];
                }
            }
            a[(row, col)] = scaling * s.re;
        }
    }
    let c = a.lu().solve(&DVector::from_column_slice(b)).expect("injective system");
    let mut x = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, e) in basis.iter().enumerate() {
        for (xi, ei) in x.iter_mut().zip(e) {
            *xi += c[k] * ei;
        }
    }
    HermitianMatrix::new(n, x).expect("hermitian reconstruction")
}

fn criterion_8() -> Outcome {
    let (n, m) = (4, 16);
    let mut worst_truth = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for i in 0..20u64 {
        let x = lib(random_low_rank(n, 1 + (i as usize % 2), false, rng::derive_seed(808, &[i, 0])))?;
        let e = lib(sample_ensemble(EnsembleSource::Sphere(n), m, rng::derive_seed(808, &[i, 1])))?;
        let p = lib(simulate_measurements(&e, &x, 0.0, NormExponent::Two, NoiseShape::GaussianRescaled, 0))?;
        let oracle = linear_system_oracle(e.vectors(), (20.0f64).sqrt(), &p.observations, n);
        let sol = lib(recover(&p, &SolverConfig::default()))?.solution;
        worst_truth = worst_truth.max((&sol - &x).frobenius_norm() / x.frobenius_norm());
        worst_oracle = worst_oracle.max((&sol - &oracle).frobenius_norm() / oracle.frobenius_norm());
    }
    check(
        worst_truth <= 1e-4 && worst_oracle <= 1e-4,
        format!("max relative error vs truth {worst_truth:.2e}, vs linear-system oracle {worst_oracle:.2e}"),
    )
}

const PHASE_CONFIG: &str = "
kind = phase_diagram
design = stabilizer 3
n = 8
r = 1
m = 12, 24, 48, 96, 144, 192
trials = 20
noise = 0 2
seed = 909
";

fn criterion_9() -> Outcome {
    let cfg = lib(ExperimentConfig::parse(PHASE_CONFIG))?;
    let report = lib(run_experiment(&cfg, None))?;
    let rates: Vec<f64> = report.cells.iter().map(|c| c.success_rate).collect();
    let drops: Vec<f64> = rates.windows(2).map(|w| w[0] - w[1]).filter(|d| *d > 0.0).collect();
    let monotone = drops.len() <= 1 && drops.iter().all(|d| *d <= 0.1 + 1e-12);
    let at = |m: usize| report.cells.iter().find(|c| c.m == m).map_or(f64::NAN, |c| c.success_rate);
    check(
        at(144) >= 0.9 && at(12) <= 0.1 && monotone,
        format!("success rates over m = 12..192: {rates:?}"),
    )
}

const NOISE_CONFIG: &str = "
kind = noise_sweep
design = stabilizer 3
n = 8
r = 1
m = 192
trials = 20
noise = 0 2, 0.01 2, 0.02 2, 0.03 2, 0.04 2, 0.05 2, 0.06 2, 0.07 2, 0.08 2, 0.09 2, 0.1 2
seed = 1010
";

fn criterion_10() -> Outcome {
    let cfg = lib(ExperimentConfig::parse(NOISE_CONFIG))?;
    let report = lib(run_experiment(&cfg, None))?;
    let fit = report.fits.first().ok_or("no fit produced")?;
    check(
        fit.correlation >= 0.99 && fit.intercept <= 1e-3,
        format!(
            "correlation {:.5}, intercept above floor {:.2e}, slope {:.4}, floor {:.2e}",
            fit.correlation, fit.intercept, fit.slope, fit.floor
        ),
    )
}

const REPRO_CONFIG: &str = "
kind = design_comparison
design = stabilizer 2
design = sphere
n = 4
r = 1, 2
m = 8, 16
trials = 3
noise = 0 2, 0.05 inf
seed = 1111
";

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("repro.cfg");
    std::fs::write(&config, REPRO_CONFIG).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let out = dir.path().join(format!("report-{}.csv", outputs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_designlift"))
            .args(["experiment", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .env_remove("DESIGNLIFT_SEED")
            .stderr(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("experiment exited with {status}"));
        }
        let mut bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
        let mut sidecar = out.into_os_string();
        sidecar.push(".quantiles.csv");
        bytes.extend(std::fs::read(&sidecar).map_err(|e| e.to_string())?);
        outputs.push(bytes);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    check(same, format!("3 runs (threads 1, 4, 1): {} bytes each incl. quantiles, identical = {same}", outputs[0].len()))
}

fn main() -> ExitCode {
    let battery_design = match stabilizer_design(3) {
        Ok(d) => d,
        Err(e) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 symmetrizer trace formula", Duration::from_secs(10), Box::new(criterion_1)),
        ("2 exact 3-design certification", Duration::from_secs(60), Box::new(criterion_2)),
        ("3 second-moment identity", Duration::MAX, Box::new(criterion_3)),
        ("4 small-ball lower bound", Duration::MAX, Box::new(|| criterion_4(&battery_design))),
        ("5 third-moment bound", Duration::MAX, Box::new(|| criterion_5(&battery_design))),
        ("6 Paley-Zygmund inequality", Duration::MAX, Box::new(criterion_6)),
        ("7 operator-norm bound on W_m", Duration::MAX, Box::new(|| criterion_7(&battery_design))),
        ("8 solver vs linear-system oracle", Duration::from_secs(30), Box::new(criterion_8)),
        ("9 recovery phase behavior", Duration::from_secs(600), Box::new(criterion_9)),
        ("10 noise robustness", Duration::MAX, Box::new(criterion_10)),
        ("11 reproducibility", Duration::MAX, Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; exceeded runtime budget {budget:?}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {name}: {detail} [{:.1}s]", elapsed.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
