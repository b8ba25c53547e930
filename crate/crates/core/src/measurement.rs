//! Rank-one measurement ensembles `A_j = sqrt(n(n+1)) a_j a_j*`, the
//! operator `Z -> (tr(Z A_j))_j`, its adjoint, and `l_q`-bounded noise.
//!
//! The scaling `sqrt(n(n+1))` is held by the ensemble; the vectors `a_j` are
//! always unit-normalized.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;

use crate::dense::{self, ZERO};
use crate::designs::{Design, NORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::hermitian::io::{fmt_f64, write_complex_line, LineReader};
use crate::hermitian::HermitianMatrix;
use crate::linalg;
use crate::rng;

/// `sqrt(n(n+1))`.
pub fn measurement_scaling(n: usize) -> f64 {
    ((n * (n + 1)) as f64).sqrt()
}

/// Exponent of the data-fidelity norm. `Inf` is the max-norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormExponent {
    One,
    Two,
    Inf,
}

impl NormExponent {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormExponent::One => v.iter().map(|x| x.abs()).sum(),
            NormExponent::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormExponent::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `m^{1/q}`, the factor in the noise term of the error bound.
    pub fn count_factor(self, m: usize) -> f64 {
        match self {
            NormExponent::One => m as f64,
            NormExponent::Two => (m as f64).sqrt(),
            NormExponent::Inf => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormExponent::One => "1",
            NormExponent::Two => "2",
            NormExponent::Inf => "inf",
        }
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(NormExponent::One),
            "2" => Ok(NormExponent::Two),
            "inf" | "infinity" => Ok(NormExponent::Inf),
            other => Err(Error::param(format!("noise exponent must be 1, 2 or inf, got `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseShape {
    /// Independent uniformly random signs on every entry.
    AdversarialUniform,
    /// Standard Gaussian direction.
    GaussianRescaled,
}

impl FromStr for NoiseShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adversarial_uniform" => Ok(NoiseShape::AdversarialUniform),
            "gaussian_rescaled" => Ok(NoiseShape::GaussianRescaled),
            other => Err(Error::param(format!("unknown noise shape `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum EnsembleSource<'a> {
    Design(&'a Design),
    Sphere(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementEnsemble {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
    scaling: f64,
    seed: u64,
}

impl MeasurementEnsemble {
    /// Validates that every vector is a unit vector in `C^dim`.
    pub fn new(dim: usize, vectors: Vec<Vec<Complex64>>, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("ensemble dimension must be positive"));
        }
        if vectors.is_empty() {
            return Err(Error::param("ensemble needs at least one measurement"));
        }
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = dense::norm(v);
            if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
                return Err(Error::param(format!("measurement vector {j} has norm {norm}")));
            }
        }
        Ok(Self {
            dim,
            vectors,
            scaling: measurement_scaling(dim),
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// First `m` measurements as a new ensemble.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.count() {
            return Err(Error::param(format!("cannot keep {m} of {} measurements", self.count())));
        }
        Ok(Self {
            vectors: self.vectors[..m].to_vec(),
            ..self.clone()
        })
    }

    pub fn apply(&self, z: &HermitianMatrix) -> Result<Vec<f64>> {
        apply_operator(self, z)
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<HermitianMatrix> {
        adjoint_operator(self, y)
    }

    /// Rows of the operator in the orthonormal Hermitian coordinate basis.
    pub(crate) fn coordinate_rows(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|a| {
                let mut row = linalg::outer_coords(a);
                row.iter_mut().for_each(|x| *x *= self.scaling);
                row
            })
            .collect()
    }

    /// Singular values of the operator as a map from Hermitian matrices with
    /// the Frobenius norm to `R^m`, in descending order. Exactly `n^2` values
    /// are returned, padded with zeros when `m < n^2`.
    pub fn singular_values(&self) -> Vec<f64> {
        let d = self.dim * self.dim;
        let rows = self.coordinate_rows();
        let mut gram = vec![ZERO; d * d];
        for row in &rows {
            for i in 0..d {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    gram[i * d + j] += Complex64::new(row[i] * row[j], 0.0);
                }
            }
        }
        let eig = HermitianMatrix::symmetrized(d, gram).eig();
        let mut values: Vec<f64> = eig.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }
}

/// Draws `m` i.i.d. measurement vectors: indices with probabilities `p_i`
/// from a design, or Haar-random unit vectors.
pub fn sample_ensemble(source: EnsembleSource<'_>, m: usize, seed: u64) -> Result<MeasurementEnsemble> {
    if m == 0 {
        return Err(Error::param("number of measurements must be at least 1"));
    }
    let mut r = rng::seeded(seed);
    match source {
        EnsembleSource::Design(d) => {
            if d.is_empty() {
                return Err(Error::param("cannot sample from an empty design"));
            }
            let unit = d.unit_vectors();
            let index = WeightedIndex::new(d.weights())
                .map_err(|e| Error::param(format!("design weights: {e}")))?;
            let vectors = (0..m).map(|_| unit[index.sample(&mut r)].clone()).collect();
            MeasurementEnsemble::new(d.dim(), vectors, seed)
        }
        EnsembleSource::Sphere(n) => {
            if n == 0 {
                return Err(Error::param("sphere dimension must be positive"));
            }
            let vectors = (0..m).map(|_| rng::unit_vector(&mut r, n)).collect();
            MeasurementEnsemble::new(n, vectors, seed)
        }
    }
}

pub fn apply_operator(e: &MeasurementEnsemble, z: &HermitianMatrix) -> Result<Vec<f64>> {
    if z.dim() != e.dim {
        return Err(Error::DimensionMismatch {
            expected: e.dim,
            found: z.dim(),
        });
    }
    Ok(e.vectors.iter().map(|a| e.scaling * z.quadratic_form(a)).collect())
}

pub fn adjoint_operator(e: &MeasurementEnsemble, y: &[f64]) -> Result<HermitianMatrix> {
    if y.len() != e.count() {
        return Err(Error::DimensionMismatch {
            expected: e.count(),
            found: y.len(),
        });
    }
    let n = e.dim;
    let mut data = vec![ZERO; n * n];
    for (a, yj) in e.vectors.iter().zip(y) {
        if *yj == 0.0 {
            continue;
        }
        let c = yj * e.scaling;
        for i in 0..n {
            let ai = a[i] * c;
            for k in 0..n {
                data[i * n + k] += ai * a[k].conj();
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(n, data))
}

/// Observations `b = A(X) + eps` with `||eps||_q <= eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryProblem {
    pub ensemble: MeasurementEnsemble,
    pub observations: Vec<f64>,
    pub noise_budget: f64,
    pub noise_exponent: NormExponent,
}

impl RecoveryProblem {
    pub fn new(
        ensemble: MeasurementEnsemble,
        observations: Vec<f64>,
        noise_budget: f64,
        noise_exponent: NormExponent,
    ) -> Result<Self> {
        if observations.len() != ensemble.count() {
            return Err(Error::DimensionMismatch {
                expected: ensemble.count(),
                found: observations.len(),
            });
        }
        if !(noise_budget >= 0.0) || !noise_budget.is_finite() {
            return Err(Error::param(format!("noise budget must be finite and >= 0, got {noise_budget}")));
        }
        if observations.iter().any(|b| !b.is_finite()) {
            return Err(Error::param("observations must be finite"));
        }
        Ok(Self {
            ensemble,
            observations,
            noise_budget,
            noise_exponent,
        })
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    /// `||A(z) - b||_q`.
    pub fn misfit(&self, z: &HermitianMatrix) -> Result<f64> {
        let az = self.ensemble.apply(z)?;
        let diff: Vec<f64> = az.iter().zip(&self.observations).map(|(a, b)| a - b).collect();
        Ok(self.noise_exponent.norm(&diff))
    }

    /// Same problem with observations and budget multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.ensemble.clone(),
            self.observations.iter().map(|b| b * s).collect(),
            self.noise_budget * s,
            self.noise_exponent,
        )
    }
}

/// Noise vector of `l_q` norm exactly `eta` (zero when `eta == 0`).
pub fn noise_vector(m: usize, eta: f64, q: NormExponent, shape: NoiseShape, seed: u64) -> Result<Vec<f64>> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::param(format!("noise level must be finite and >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Ok(vec![0.0; m]);
    }
    let mut r = rng::seeded(seed);
    let raw: Vec<f64> = loop {
        let raw: Vec<f64> = match shape {
            NoiseShape::AdversarialUniform => (0..m)
                .map(|_| if r.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            NoiseShape::GaussianRescaled => (0..m).map(|_| rng::standard_normal(&mut r)).collect(),
        };
        if q.norm(&raw) > 0.0 {
            break raw;
        }
    };
    let s = eta / q.norm(&raw);
    Ok(raw.into_iter().map(|x| x * s).collect())
}

pub fn simulate_measurements(
    e: &MeasurementEnsemble,
    x: &HermitianMatrix,
    eta: f64,
    q: NormExponent,
    shape: NoiseShape,
    seed: u64,
) -> Result<RecoveryProblem> {
    let clean = e.apply(x)?;
    let eps = noise_vector(e.count(), eta, q, shape, seed)?;
    let b = clean.iter().zip(&eps).map(|(a, n)| a + n).collect();
    RecoveryProblem::new(e.clone(), b, eta, q)
}

pub fn write_ensemble(out: &mut impl Write, e: &MeasurementEnsemble) -> std::io::Result<()> {
    writeln!(out, "ENS {} {} {} {}", e.dim, e.count(), fmt_f64(e.scaling), e.seed)?;
    for v in &e.vectors {
        for z in v {
            write_complex_line(out, *z)?;
        }
    }
    Ok(())
}

pub fn read_ensemble(reader: impl BufRead) -> Result<MeasurementEnsemble> {
    let mut r = LineReader::new(reader);
    let header = r.header("ENS")?;
    if header.len() != 4 {
        return Err(Error::parse(r.line(), "expected `ENS n m scaling seed`"));
    }
    let n = r.parse_usize(&header[0])?;
    let m = r.parse_usize(&header[1])?;
    let scaling = r.parse_f64(&header[2])?;
    let seed: u64 = header[3]
        .parse()
        .map_err(|_| Error::parse(r.line(), format!("`{}` is not a seed", header[3])))?;
    if n == 0 || m == 0 {
        return Err(Error::parse(r.line(), "dimension and count must be positive"));
    }
    let expected = measurement_scaling(n);
    if (scaling - expected).abs() > 1e-12 * expected {
        return Err(Error::parse(r.line(), format!("scaling {scaling} differs from sqrt(n(n+1)) = {expected}")));
    }
    let mut vectors = Vec::with_capacity(m);
    for _ in 0..m {
        vectors.push((0..n).map(|_| r.next_complex()).collect::<Result<Vec<_>>>()?);
    }
    r.expect_end()?;
    MeasurementEnsemble::new(n, vectors, seed)
}

pub fn write_observations(out: &mut impl Write, p: &RecoveryProblem) -> std::io::Result<()> {
    writeln!(
        out,
        "OBS {} {} {}",
        p.observations.len(),
        p.noise_exponent,
        fmt_f64(p.noise_budget)
    )?;
    for b in &p.observations {
        writeln!(out, "{}", fmt_f64(*b))?;
    }
    Ok(())
}

/// Observation vector, exponent and budget from an `OBS` stream.
pub fn read_observations(reader: impl BufRead) -> Result<(Vec<f64>, NormExponent, f64)> {
    let mut r = LineReader::new(reader);
    let header = r.header("OBS")?;
    if header.len() != 3 {
        return Err(Error::parse(r.line(), "expected `OBS m q eta`"));
    }
    let m = r.parse_usize(&header[0])?;
    let q: NormExponent = header[1]
        .parse()
        .map_err(|_| Error::parse(r.line(), format!("bad exponent `{}`", header[1])))?;
    let eta = r.parse_f64(&header[2])?;
    let b = (0..m).map(|_| r.next_f64()).collect::<Result<Vec<_>>>()?;
    r.expect_end()?;
    Ok((b, q, eta))
}

pub fn save_ensemble(path: impl AsRef<Path>, e: &MeasurementEnsemble) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_ensemble(&mut buf, e).map_err(|err| Error::io(path, err))?;
    fs::write(path, buf).map_err(|err| Error::io(path, err))
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<MeasurementEnsemble> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_ensemble(BufReader::new(f))
}

pub fn save_observations(path: impl AsRef<Path>, p: &RecoveryProblem) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_observations(&mut buf, p).map_err(|err| Error::io(path, err))?;
    fs::write(path, buf).map_err(|err| Error::io(path, err))
}

/// Pairs an ensemble file with an observation file.
pub fn load_problem(ensemble: impl AsRef<Path>, observations: impl AsRef<Path>) -> Result<RecoveryProblem> {
    let e = load_ensemble(ensemble)?;
    let path = observations.as_ref();
    let f = fs::File::open(path).map_err(|err| Error::io(path, err))?;
    let (b, q, eta) = read_observations(BufReader::new(f))?;
    RecoveryProblem::new(e, b, eta, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::stabilizer_design;

    fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
        let mut r = rng::seeded(seed);
        let data: Vec<Complex64> = (0..n * n).map(|_| rng::complex_normal(&mut r)).collect();
        HermitianMatrix::symmetrized(n, data)
    }

    #[test]
    fn identity_gives_scaling() {
        let e = sample_ensemble(EnsembleSource::Sphere(3), 5, 1).unwrap();
        for y in e.apply(&HermitianMatrix::identity(3)).unwrap() {
            assert!((y - 12f64.sqrt()).abs() < 1e-12);
        }
        let a1 = HermitianMatrix::outer(&e.vectors()[0]);
        assert!((e.apply(&a1).unwrap()[0] - 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn adjoint_of_basis_vector() {
        let e = sample_ensemble(EnsembleSource::Sphere(3), 4, 2).unwrap();
        let a = e.adjoint(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expect = HermitianMatrix::outer(&e.vectors()[0]).scaled(e.scaling());
        assert!((&a - &expect).frobenius_norm() < 1e-13);
        assert_eq!(e.adjoint(&[0.0; 4]).unwrap(), HermitianMatrix::zeros(3));
        assert!(e.adjoint(&[0.0; 3]).is_err());
        assert!(e.apply(&HermitianMatrix::zeros(2)).is_err());
    }

    #[test]
    fn single_vector_design_repeats() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let d = Design::uniform(2, vec![v.clone()]).unwrap();
        let e = sample_ensemble(EnsembleSource::Design(&d), 7, 3).unwrap();
        assert!(e.vectors().iter().all(|a| *a == v));
    }

    #[test]
    fn coordinate_rows_reproduce_operator() {
        let e = sample_ensemble(EnsembleSource::Sphere(3), 6, 4).unwrap();
        let z = random_hermitian(5, 3);
        let c = linalg::to_coords(&z);
        for (row, y) in e.coordinate_rows().iter().zip(e.apply(&z).unwrap()) {
            assert!((linalg::dot(row, &c) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_detect_injectivity() {
        let e = sample_ensemble(EnsembleSource::Sphere(2), 3, 6).unwrap();
        let s = e.singular_values();
        assert_eq!(s.len(), 4);
        assert!(s[3] < 1e-10);
        let d = stabilizer_design(1).unwrap();
        let e = MeasurementEnsemble::new(2, d.vectors().to_vec(), 0).unwrap();
        assert!(*e.singular_values().last().unwrap() > 0.5);
    }

    #[test]
    fn noise_has_exact_norm() {
        for q in [NormExponent::One, NormExponent::Two, NormExponent::Inf] {
            for shape in [NoiseShape::AdversarialUniform, NoiseShape::GaussianRescaled] {
                let eps = noise_vector(13, 0.7, q, shape, 9).unwrap();
                assert!((q.norm(&eps) - 0.7).abs() < 1e-12);
            }
        }
        let eps = noise_vector(10, 1.0, NormExponent::Inf, NoiseShape::AdversarialUniform, 1).unwrap();
        assert!(eps.iter().all(|x| (x.abs() - 1.0).abs() < 1e-15));
        assert!(noise_vector(5, 0.0, NormExponent::Two, NoiseShape::GaussianRescaled, 1)
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
        assert!(noise_vector(5, -1.0, NormExponent::Two, NoiseShape::GaussianRescaled, 1).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let e = sample_ensemble(EnsembleSource::Sphere(3), 4, 11).unwrap();
        let x = random_hermitian(3, 3);
        let p = simulate_measurements(&e, &x, 0.25, NormExponent::Inf, NoiseShape::GaussianRescaled, 5).unwrap();
        let mut buf = Vec::new();
        write_ensemble(&mut buf, &e).unwrap();
        assert_eq!(read_ensemble(buf.as_slice()).unwrap(), e);
        let mut buf = Vec::new();
        write_observations(&mut buf, &p).unwrap();
        let (b, q, eta) = read_observations(buf.as_slice()).unwrap();
        assert_eq!(b, p.observations);
        assert_eq!(q, NormExponent::Inf);
        assert_eq!(eta, 0.25);
        assert!(read_ensemble("ENS 1 1 1.0 0\n1 0\n".as_bytes()).is_err());
    }
}
