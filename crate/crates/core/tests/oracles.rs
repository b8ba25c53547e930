//! Library results checked against independent oracles built here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use designlift::designs::{save_design, stabilizer_design, Design};
use designlift::experiment::{random_low_rank, run_experiment, ExperimentConfig};
use designlift::measurement::{
    sample_ensemble, simulate_measurements, EnsembleSource, MeasurementEnsemble, NoiseShape, NormExponent,
};
use designlift::solver::{recover, recover_psd, SolverConfig};
use designlift::theory::{random_unit_hermitian, wm_estimate};
use designlift::HermitianMatrix;

fn quad(v: &[Complex64], z: &HermitianMatrix) -> f64 {
    let n = v.len();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += v[i].conj() * z.get(i, j) * v[j];
        }
    }
    s.re
}

/// Real `m x n^2` matrix of the measurement operator in the basis
/// `E_ii`, `E_ij + E_ji`, `i(E_ij - E_ji)` (i < j), plus that basis.
fn operator_matrix(e: &MeasurementEnsemble) -> (DMatrix<f64>, Vec<HermitianMatrix>) {
    let n = e.dim();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut re = vec![Complex64::new(0.0, 0.0); n * n];
            if i == j {
                re[i * n + i] = Complex64::new(1.0, 0.0);
                basis.push(HermitianMatrix::new(n, re).unwrap());
                continue;
            }
            let mut im = re.clone();
            re[i * n + j] = Complex64::new(1.0, 0.0);
            re[j * n + i] = Complex64::new(1.0, 0.0);
            im[i * n + j] = Complex64::new(0.0, -1.0);
            im[j * n + i] = Complex64::new(0.0, 1.0);
            basis.push(HermitianMatrix::new(n, re).unwrap());
            basis.push(HermitianMatrix::new(n, im).unwrap());
        }
    }
    let s = ((n * (n + 1)) as f64).sqrt();
    let a = DMatrix::from_fn(e.count(), basis.len(), |r, c| s * quad(&e.vectors()[r], &basis[c]));
    (a, basis)
}

#[test]
fn operator_and_adjoint_match_dense_matrix() {
    let e = sample_ensemble(EnsembleSource::Sphere(3), 7, 2).unwrap();
    let (a, basis) = operator_matrix(&e);
    let z = random_unit_hermitian(3, 4);
    let coords: Vec<f64> = basis
        .iter()
        .map(|b| b.frobenius_inner(&z) / b.frobenius_inner(b))
        .collect();
    let expected = &a * DVector::from_vec(coords);
    let got = e.apply(&z).unwrap();
    for (x, y) in got.iter().zip(expected.iter()) {
        assert!((x - y).abs() < 1e-12);
    }
    let y: Vec<f64> = (0..7).map(|k| (k as f64 - 3.0) * 0.3).collect();
    let adj = e.adjoint(&y).unwrap();
    for (c, b) in basis.iter().enumerate() {
        let want: f64 = (0..7).map(|r| a[(r, c)] * y[r]).sum();
        assert!((adj.frobenius_inner(b) - want).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noiseless_injective_recovery_matches_linear_solve(n in 2usize..=4, extra in 0usize..6, rank in 1usize..=2, seed in 0u64..1000) {
        let rank = rank.min(n);
        let m = n * n + extra;
        let x = random_low_rank(n, rank, false, seed).unwrap();
        let e = sample_ensemble(EnsembleSource::Sphere(n), m, seed + 1).unwrap();
        let p = simulate_measurements(&e, &x, 0.0, NormExponent::Two, NoiseShape::GaussianRescaled, 0).unwrap();
        let (a, basis) = operator_matrix(&e);
        let c = a.svd(true, true).solve(&DVector::from_vec(p.observations.clone()), 1e-12).unwrap();
        let mut oracle = HermitianMatrix::zeros(n);
        for (k, b) in basis.iter().enumerate() {
            oracle = &oracle + &b.scaled(c[k]);
        }
        prop_assert!((&oracle - &x).frobenius_norm() < 1e-8);
        let sol = recover(&p, &SolverConfig::default()).unwrap();
        prop_assert!(sol.converged);
        prop_assert!((&sol.solution - &oracle).frobenius_norm() < 1e-4);
    }

    #[test]
    fn recovery_is_scale_covariant(seed in 0u64..1000, s in 0.1f64..10.0) {
        let x = random_low_rank(4, 1, false, seed).unwrap();
        let e = sample_ensemble(EnsembleSource::Sphere(4), 12, seed + 7).unwrap();
        let p = simulate_measurements(&e, &x, 0.05, NormExponent::Two, NoiseShape::GaussianRescaled, seed).unwrap();
        let cfg = SolverConfig { primal_tolerance: 1e-9, dual_tolerance: 1e-9, max_iterations: 20000, ..SolverConfig::default() };
        let base = recover(&p, &cfg).unwrap();
        let scaled = recover(&p.scaled(s).unwrap(), &cfg).unwrap();
        let diff = (&scaled.solution - &base.solution.scaled(s)).frobenius_norm();
        prop_assert!(diff <= 1e-6 * s * base.solution.frobenius_norm().max(1.0), "diff {}", diff);
    }
}

#[test]
fn noisy_solution_is_feasible_and_psd_variant_is_psd() {
    let d = stabilizer_design(2).unwrap();
    for (q, shape) in [
        (NormExponent::One, NoiseShape::AdversarialUniform),
        (NormExponent::Two, NoiseShape::GaussianRescaled),
        (NormExponent::Inf, NoiseShape::GaussianRescaled),
    ] {
        let x = random_low_rank(4, 1, true, 3).unwrap();
        let e = sample_ensemble(EnsembleSource::Design(&d), 20, 4).unwrap();
        let p = simulate_measurements(&e, &x, 0.05, q, shape, 5).unwrap();
        let cfg = SolverConfig::default();
        for (psd, r) in [(false, recover(&p, &cfg).unwrap()), (true, recover_psd(&p, &cfg).unwrap())] {
            assert!(r.converged, "q = {q} psd = {psd}");
            let b_norm = q.norm(&p.observations).max(1.0);
            assert!(p.misfit(&r.solution).unwrap() <= 0.05 + cfg.primal_tolerance * b_norm * 10.0);
            assert!(r.solution.max_asymmetry() <= 1e-10);
            if psd {
                assert!(r.solution.eig().eigenvalues().iter().all(|v| *v >= -1e-6));
            }
        }
    }
}

#[test]
fn width_standard_error_shrinks_with_trials() {
    let d = stabilizer_design(2).unwrap();
    let small = wm_estimate(EnsembleSource::Design(&d), 30, 400, 1, 1, 0.5).unwrap();
    let large = wm_estimate(EnsembleSource::Design(&d), 30, 800, 1, 1, 0.5).unwrap();
    let ratio = large.standard_error / small.standard_error;
    let expected = 1.0 / 2f64.sqrt();
    assert!((ratio - expected).abs() <= 0.3 * expected, "ratio {ratio}");
    assert!(large.within_bound && small.within_bound);
}

#[test]
fn single_vector_design_never_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = vec![Complex64::new(0.0, 0.0); 4];
    v[0] = Complex64::new(1.0, 0.0);
    save_design(dir.path().join("one.design"), &Design::uniform(4, vec![v]).unwrap()).unwrap();
    let cfg = ExperimentConfig::parse("design = file one.design\nm = 4, 15\ntrials = 5\nseed = 2\n").unwrap();
    let report = run_experiment(&cfg, Some(dir.path())).unwrap();
    assert!(report.cells.iter().all(|c| c.success_rate == 0.0 && c.design == "file:one.design"));
}

#[test]
fn comparison_has_one_row_per_design_and_cell() {
    let cfg = ExperimentConfig::parse(
        "kind = design_comparison\ndesign = stabilizer 2\ndesign = sphere\nn = 4\nr = 1, 2\nm = 6, 16\ntrials = 3\nnoise = 0, 0.01\nseed = 4\nsuccess_threshold = 1e-2\n",
    )
    .unwrap();
    let report = run_experiment(&cfg, None).unwrap();
    assert_eq!(report.cells.len(), 2 * 2 * 2 * 2);
    let csv = report.to_csv();
    assert_eq!(csv.lines().count(), 2 + report.cells.len());
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 11));
    for c in &report.cells {
        let hits = c.errors.iter().filter(|e| **e <= 1e-2).count();
        assert_eq!(c.success_rate, hits as f64 / c.trials as f64);
        assert_eq!(c.errors.len(), 3);
    }
    let again = run_experiment(&cfg, None).unwrap();
    assert_eq!(again.to_csv(), csv);
}

#[test]
fn noiseless_cell_matches_sweep_floor() {
    let cfg = ExperimentConfig::parse(
        "kind = noise_sweep\ndesign = stabilizer 2\nm = 16, 32\ntrials = 6\nnoise = 0, 0.02, 0.04, 0.06, 0.08\nseed = 12\n",
    )
    .unwrap();
    let report = run_experiment(&cfg, None).unwrap();
    for f in &report.fits {
        let zero = report.cells.iter().find(|c| c.m == f.m && c.eta == 0.0).unwrap();
        assert_eq!(zero.median_rel_error, f.floor);
        assert!(f.correlation >= 0.99, "{f:?}");
    }
    let at = |m: usize| report.cells.iter().find(|c| c.m == m && c.eta == 0.08).unwrap().median_rel_error;
    assert!(at(32) / at(16) < 1.0);
}
