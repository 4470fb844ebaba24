//! Random-matrix ensemble sampling.
//!
//! Three families are supported:
//!
//! * `gaussian-invariant`: GOE / GUE / GSE dense matrices for beta = 1, 2, 4,
//!   scaled so the joint eigenvalue density carries the weight
//!   `exp(-beta n lambda^2 / 4)` per eigenvalue (semicircle support [-2, 2]
//!   before the global rescaling to [-1, 1]).
//! * `beta-tridiagonal`: the tridiagonal model with `N(0, 2)` diagonal and
//!   chi-distributed off-diagonals with `beta * (n - k)` degrees of freedom,
//!   matrix divided by sqrt(2); valid for any positive beta.
//! * `wigner-iid`: independent entries from a named distribution,
//!   standardized so the off-diagonal entry variance is `1/n` and the
//!   limiting support is [-2, 2].
//!
//! Sampling is a pure function of the `EnsembleSpec`, including its seed;
//! entries are drawn in a fixed row-major upper-triangle order.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, ChiSquared, Distribution, Exp, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GaussianInvariant,
    BetaTridiagonal,
    WignerIid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    RealSymmetric,
    ComplexHermitian,
    QuaternionSelfDual,
}

impl Symmetry {
    /// Number of real components per off-diagonal entry (the Dyson index).
    pub fn beta(self) -> f64 {
        match self {
            Symmetry::RealSymmetric => 1.0,
            Symmetry::ComplexHermitian => 2.0,
            Symmetry::QuaternionSelfDual => 4.0,
        }
    }
}

/// Entry distribution for `wigner-iid` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum EntryDist {
    Normal,
    Uniform,
    Exponential,
    Poisson { lambda: f64 },
    Beta { p: f64, q: f64 },
    ChiSquared { k: f64 },
}

impl EntryDist {
    /// Mean and variance of the raw (unstandardized) distribution.
    pub fn moments(&self) -> Result<(f64, f64), SampleError> {
        let (mean, var) = match *self {
            EntryDist::Normal => (0.0, 1.0),
            EntryDist::Uniform => (0.5, 1.0 / 12.0),
            EntryDist::Exponential => (1.0, 1.0),
            EntryDist::Poisson { lambda } => {
                if !(lambda > 0.0) {
                    return Err(SampleError::BadDistribution("poisson requires lambda > 0"));
                }
                (lambda, lambda)
            }
            EntryDist::Beta { p, q } => {
                if !(p > 0.0 && q > 0.0) {
                    return Err(SampleError::BadDistribution("beta requires p, q > 0"));
                }
                let s = p + q;
                (p / s, p * q / (s * s * (s + 1.0)))
            }
            EntryDist::ChiSquared { k } => {
                if !(k > 0.0) {
                    return Err(SampleError::BadDistribution("chi-squared requires k > 0"));
                }
                (k, 2.0 * k)
            }
        };
        if !(var > 0.0) {
            return Err(SampleError::BadDistribution("entry distribution has zero variance"));
        }
        Ok((mean, var))
    }
}

/// Full description of one ensemble draw. Serializes with exactly these
/// field names; `entry_dist` and `symmetry` apply to `wigner-iid` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    pub beta: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_dist: Option<EntryDist>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<Symmetry>,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn gaussian(beta: f64, n: usize, seed: u64) -> Self {
        EnsembleSpec {
            family: Family::GaussianInvariant,
            beta,
            n,
            entry_dist: None,
            symmetry: None,
            seed,
        }
    }

    pub fn tridiagonal(beta: f64, n: usize, seed: u64) -> Self {
        EnsembleSpec {
            family: Family::BetaTridiagonal,
            beta,
            n,
            entry_dist: None,
            symmetry: None,
            seed,
        }
    }

    pub fn wigner(dist: EntryDist, symmetry: Symmetry, n: usize, seed: u64) -> Self {
        EnsembleSpec {
            family: Family::WignerIid,
            beta: symmetry.beta(),
            n,
            entry_dist: Some(dist),
            symmetry: Some(symmetry),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        s.seed = seed;
        s
    }

    pub fn with_n(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.n = n;
        s
    }
}

#[derive(Clone, Debug)]
pub enum MatrixStorage {
    /// Full row-major real symmetric matrix.
    DenseReal { n: usize, a: Vec<f64> },
    /// Full row-major complex Hermitian matrix.
    DenseComplex { n: usize, a: Vec<Complex64> },
    /// 2n x 2n complex Hermitian embedding of an n x n quaternion self-dual
    /// matrix; every eigenvalue appears twice.
    QuaternionEmbedded { n: usize, a: Vec<Complex64> },
    /// Symmetric tridiagonal: `diag.len() == n`, `offdiag.len() == n - 1`.
    Tridiagonal { diag: Vec<f64>, offdiag: Vec<f64> },
}

/// One sampled matrix together with the spec that produced it.
#[derive(Clone, Debug)]
pub struct MatrixSample {
    pub spec: EnsembleSpec,
    pub storage: MatrixStorage,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("gaussian-invariant ensembles require beta in {{1, 2, 4}}, got {0}")]
    BadInvariantBeta(f64),
    #[error("beta-tridiagonal requires beta > 0, got {0}")]
    BadTridiagonalBeta(f64),
    #[error("wigner-iid requires entry_dist and symmetry")]
    MissingWignerFields,
    #[error("{0}")]
    BadDistribution(&'static str),
    #[error("beta {beta} inconsistent with symmetry class (expected {expected})")]
    BetaSymmetryMismatch { beta: f64, expected: f64 },
    #[error("{family:?} does not accept entry_dist / symmetry fields")]
    UnexpectedWignerFields { family: Family },
}

/// Samples a matrix according to `spec`.
pub fn sample(spec: &EnsembleSpec) -> Result<MatrixSample, SampleError> {
    if spec.n == 0 {
        return Err(SampleError::EmptyMatrix);
    }
    match spec.family {
        Family::GaussianInvariant => sample_gaussian_invariant(spec),
        Family::BetaTridiagonal => sample_beta_tridiagonal(spec),
        Family::WignerIid => sample_wigner(spec),
    }
}

fn reject_wigner_fields(spec: &EnsembleSpec) -> Result<(), SampleError> {
    if spec.entry_dist.is_some() || spec.symmetry.is_some() {
        return Err(SampleError::UnexpectedWignerFields { family: spec.family });
    }
    Ok(())
}

/// GOE / GUE / GSE with diagonal variance `2 / (beta n)` and off-diagonal
/// component variance `1 / (beta n)`, so the matrix density is proportional
/// to `exp(-beta n tr(H^2) / 4)`.
pub fn sample_gaussian_invariant(spec: &EnsembleSpec) -> Result<MatrixSample, SampleError> {
    reject_wigner_fields(spec)?;
    let symmetry = match spec.beta {
        b if b == 1.0 => Symmetry::RealSymmetric,
        b if b == 2.0 => Symmetry::ComplexHermitian,
        b if b == 4.0 => Symmetry::QuaternionSelfDual,
        b => return Err(SampleError::BadInvariantBeta(b)),
    };
    let n = spec.n;
    let nf = n as f64;
    let beta = spec.beta;
    let diag_sd = (2.0 / (beta * nf)).sqrt();
    let comp_sd = (1.0 / (beta * nf)).sqrt();
    let mut rng = rng_from_seed(spec.seed);
    let storage = fill_dense(symmetry, n, &mut |rng: &mut ChaCha8Rng| {
        diag_sd * rng.sample::<f64, _>(StandardNormal)
    }, &mut |rng: &mut ChaCha8Rng| {
        comp_sd * rng.sample::<f64, _>(StandardNormal)
    }, &mut rng);
    Ok(MatrixSample { spec: spec.clone(), storage })
}

/// Tridiagonal model: diagonal `N(0, 2)`, k-th off-diagonal a chi variable
/// with `beta (n - k)` degrees of freedom, everything divided by sqrt(2).
/// The eigenvalue density matches the invariant-ensemble weight after the
/// eigenvalues are multiplied by `sqrt(2 / (beta n))` (done downstream).
pub fn sample_beta_tridiagonal(spec: &EnsembleSpec) -> Result<MatrixSample, SampleError> {
    reject_wigner_fields(spec)?;
    if !(spec.beta > 0.0) {
        return Err(SampleError::BadTridiagonalBeta(spec.beta));
    }
    let n = spec.n;
    let mut rng = rng_from_seed(spec.seed);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let normal = Normal::new(0.0, 2f64.sqrt()).expect("valid normal");
    let diag: Vec<f64> = (0..n).map(|_| inv_sqrt2 * normal.sample(&mut rng)).collect();
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let df = spec.beta * (n - k) as f64;
        let x = chi(df, &mut rng);
        debug_assert!(x > 0.0);
        offdiag.push(inv_sqrt2 * x);
    }
    Ok(MatrixSample {
        spec: spec.clone(),
        storage: MatrixStorage::Tridiagonal { diag, offdiag },
    })
}

/// Chi-distributed variable with `df` degrees of freedom (df need not be an
/// integer): the square root of a chi-squared draw.
pub fn chi(df: f64, rng: &mut ChaCha8Rng) -> f64 {
    let chi2 = ChiSquared::new(df).expect("df > 0");
    chi2.sample(rng).sqrt()
}

/// Shift and scale standardizing an entry distribution: draws are mapped to
/// `(x - shift) * scale` so that the result has mean 0 and variance `1/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Standardization {
    pub shift: f64,
    pub scale: f64,
}

pub fn standardize_entry_distribution(
    dist: &EntryDist,
    n: usize,
) -> Result<Standardization, SampleError> {
    if n == 0 {
        return Err(SampleError::EmptyMatrix);
    }
    let (mean, var) = dist.moments()?;
    Ok(Standardization {
        shift: mean,
        scale: 1.0 / (var * n as f64).sqrt(),
    })
}

enum RawDist {
    Normal,
    Uniform,
    Exponential(Exp<f64>),
    Poisson(Poisson<f64>),
    Beta(Beta<f64>),
    ChiSquared(ChiSquared<f64>),
}

impl RawDist {
    fn new(dist: &EntryDist) -> Self {
        match *dist {
            EntryDist::Normal => RawDist::Normal,
            EntryDist::Uniform => RawDist::Uniform,
            EntryDist::Exponential => RawDist::Exponential(Exp::new(1.0).expect("rate > 0")),
            EntryDist::Poisson { lambda } => {
                RawDist::Poisson(Poisson::new(lambda).expect("lambda > 0"))
            }
            EntryDist::Beta { p, q } => RawDist::Beta(Beta::new(p, q).expect("p, q > 0")),
            EntryDist::ChiSquared { k } => {
                RawDist::ChiSquared(ChiSquared::new(k).expect("k > 0"))
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            RawDist::Normal => rng.sample(StandardNormal),
            RawDist::Uniform => rng.random::<f64>(),
            RawDist::Exponential(d) => d.sample(rng),
            RawDist::Poisson(d) => d.sample(rng),
            RawDist::Beta(d) => d.sample(rng),
            RawDist::ChiSquared(d) => d.sample(rng),
        }
    }
}

/// Wigner matrix with i.i.d. standardized entries. Off-diagonal entries have
/// total variance `1/n` split evenly over the symmetry class components;
/// diagonal entries carry variance `2 / (beta n)`, mirroring the Gaussian
/// invariant ensembles (for `normal` entries the construction coincides with
/// GOE / GUE / GSE exactly).
pub fn sample_wigner(spec: &EnsembleSpec) -> Result<MatrixSample, SampleError> {
    let (dist, symmetry) = match (&spec.entry_dist, spec.symmetry) {
        (Some(d), Some(s)) => (*d, s),
        _ => return Err(SampleError::MissingWignerFields),
    };
    if spec.beta != symmetry.beta() {
        return Err(SampleError::BetaSymmetryMismatch {
            beta: spec.beta,
            expected: symmetry.beta(),
        });
    }
    let n = spec.n;
    let std = standardize_entry_distribution(&dist, n)?;
    let raw = RawDist::new(&dist);
    let beta = symmetry.beta();
    let comp_factor = 1.0 / beta.sqrt();
    let diag_factor = (2.0 / beta).sqrt();
    let mut rng = rng_from_seed(spec.seed);
    let storage = {
        let raw = &raw;
        let mut diag =
            |rng: &mut ChaCha8Rng| diag_factor * (raw.draw(rng) - std.shift) * std.scale;
        let mut comp =
            |rng: &mut ChaCha8Rng| comp_factor * (raw.draw(rng) - std.shift) * std.scale;
        fill_dense(symmetry, n, &mut diag, &mut comp, &mut rng)
    };
    Ok(MatrixSample { spec: spec.clone(), storage })
}

/// Fills a dense matrix of the given symmetry class, drawing the diagonal
/// and off-diagonal components in row-major upper-triangle order.
fn fill_dense(
    symmetry: Symmetry,
    n: usize,
    diag: &mut dyn FnMut(&mut ChaCha8Rng) -> f64,
    comp: &mut dyn FnMut(&mut ChaCha8Rng) -> f64,
    rng: &mut ChaCha8Rng,
) -> MatrixStorage {
    match symmetry {
        Symmetry::RealSymmetric => {
            let mut a = vec![0.0f64; n * n];
            for i in 0..n {
                a[i * n + i] = diag(rng);
                for j in i + 1..n {
                    let v = comp(rng);
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            MatrixStorage::DenseReal { n, a }
        }
        Symmetry::ComplexHermitian => {
            let mut a = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                a[i * n + i] = Complex64::new(diag(rng), 0.0);
                for j in i + 1..n {
                    let re = comp(rng);
                    let im = comp(rng);
                    a[i * n + j] = Complex64::new(re, im);
                    a[j * n + i] = Complex64::new(re, -im);
                }
            }
            MatrixStorage::DenseComplex { n, a }
        }
        Symmetry::QuaternionSelfDual => {
            let m = 2 * n;
            let mut a = vec![Complex64::new(0.0, 0.0); m * m];
            let put = |a: &mut Vec<Complex64>, bi: usize, bj: usize, q: [f64; 4]| {
                // quaternion q0 + q1 i + q2 j + q3 k as a 2x2 complex block
                let blk = [
                    [Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3])],
                    [Complex64::new(-q[2], q[3]), Complex64::new(q[0], -q[1])],
                ];
                for r in 0..2 {
                    for c in 0..2 {
                        a[(2 * bi + r) * m + (2 * bj + c)] = blk[r][c];
                        // Hermitian mirror
                        a[(2 * bj + c) * m + (2 * bi + r)] = blk[r][c].conj();
                    }
                }
            };
            for i in 0..n {
                let d = diag(rng);
                put(&mut a, i, i, [d, 0.0, 0.0, 0.0]);
                for j in i + 1..n {
                    let q = [comp(rng), comp(rng), comp(rng), comp(rng)];
                    put(&mut a, i, j, q);
                }
            }
            MatrixStorage::QuaternionEmbedded { n, a }
        }
    }
}
