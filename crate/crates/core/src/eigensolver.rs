//! Symmetric eigensolver: Householder reduction plus implicit-shift QL.
//!
//! Eigenvalues only (no eigenvectors), which keeps dense solves at
//! `O(n^3)` with a small constant and tridiagonal solves at `O(n^2)`.
//! A Sturm-sequence bisection solver is kept alongside as an independent
//! algorithm for cross-checks.

use num_complex::Complex64;
use thiserror::Error;

use crate::sampler::{EnsembleSpec, Family, MatrixSample, MatrixStorage};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("QL iteration failed to converge for eigenvalue {index}")]
    NotConverged { index: usize },
    #[error("offdiag length {got} does not match dimension {n}")]
    ShapeMismatch { n: usize, got: usize },
    #[error("quaternion spectrum pairing failed at pair {index}: gap {gap:e} exceeds tolerance")]
    PairingFailure { index: usize, gap: f64 },
    #[error("matrix dimension must be positive")]
    Empty,
}

/// Ordered spectrum of one sampled matrix, rescaled so the limiting support
/// is `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// The spec that produced the underlying sample.
    pub spec: EnsembleSpec,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL,
/// ascending. `offdiag[k]` couples rows `k` and `k+1`.
///
/// Subdiagonal entries are deflated when `|e| <= eps (|d_i| + |d_{i+1}|)`
/// with `eps` the machine epsilon; accuracy is a small multiple of
/// `eps * spectral_radius`.
pub fn eigenvalues_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = diag.len();
    if n == 0 {
        return Err(SolveError::Empty);
    }
    if offdiag.len() + 1 != n {
        return Err(SolveError::ShapeMismatch { n, got: offdiag.len() });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(offdiag);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}

/// In-place implicit-shift QL sweep on `d` with subdiagonal `e`
/// (`e[n-1]` is workspace and must be zero on entry).
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<(), SolveError> {
    let n = d.len();
    const MAX_SWEEPS: usize = 50;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a deflated block [l, m]
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(SolveError::NotConverged { index: l });
            }
            // implicit shift from the 2x2 block at l
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // negligible rotation: deflate early and restart
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence counting
/// and bisection, ascending. Independent of the QL path; used for
/// cross-validation. `abs_tol` bounds the absolute eigenvalue error.
pub fn eigenvalues_tridiagonal_bisection(
    diag: &[f64],
    offdiag: &[f64],
    abs_tol: f64,
) -> Result<Vec<f64>, SolveError> {
    let n = diag.len();
    if n == 0 {
        return Err(SolveError::Empty);
    }
    if offdiag.len() + 1 != n {
        return Err(SolveError::ShapeMismatch { n, got: offdiag.len() });
    }
    // Gershgorin enclosure
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    let emax = offdiag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pivmin = (f64::EPSILON * emax).powi(2).max(f64::MIN_POSITIVE);
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..n {
            let esq = if i > 0 { offdiag[i - 1] * offdiag[i - 1] } else { 0.0 };
            q = diag[i] - x - esq / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (mut a, mut b) = (lo, hi);
        while b - a > abs_tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break; // interval at floating-point resolution
            }
            if count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Householder reduction of a real symmetric matrix (row-major, full
/// storage; the lower triangle is read) to tridiagonal form. Returns
/// `(diag, offdiag)`; `a` is destroyed.
pub fn tridiagonalize_real(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut e = vec![0.0f64; n.saturating_sub(1)];
    let mut p = vec![0.0f64; n];
    for i in (1..n).rev() {
        let l = i; // row i holds the vector to eliminate: a[i][0..i]
        let mut scale = 0.0;
        for k in 0..l {
            scale += a[i * n + k].abs();
        }
        if scale == 0.0 {
            e[i - 1] = 0.0;
            continue;
        }
        let mut h = 0.0;
        for k in 0..l {
            a[i * n + k] /= scale;
            h += a[i * n + k] * a[i * n + k];
        }
        let f = a[i * n + l - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i - 1] = scale * g;
        h -= f * g;
        a[i * n + l - 1] = f - g;
        // p = A u / h over the leading l x l block (lower triangle)
        for j in 0..l {
            p[j] = a[j * n + j] * a[i * n + j];
        }
        for j in 1..l {
            let uj = a[i * n + j];
            let row = j * n;
            let mut s = 0.0;
            for k in 0..j {
                let ajk = a[row + k];
                s += ajk * a[i * n + k];
                p[k] += ajk * uj;
            }
            p[j] += s;
        }
        let mut f_acc = 0.0;
        for j in 0..l {
            p[j] /= h;
            f_acc += p[j] * a[i * n + j];
        }
        let hh = f_acc / (2.0 * h);
        for j in 0..l {
            p[j] -= hh * a[i * n + j];
        }
        // rank-2 update of the leading block: A -= u q^T + q u^T
        for j in 0..l {
            let uj = a[i * n + j];
            let qj = p[j];
            let row = j * n;
            for k in 0..=j {
                a[row + k] -= uj * p[k] + qj * a[i * n + k];
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|j| a[j * n + j]).collect();
    (d, e)
}

/// Householder reduction of a complex Hermitian matrix to a real symmetric
/// tridiagonal with the same spectrum. Returns `(diag, offdiag)` with
/// nonnegative `offdiag` (phases are dropped: a diagonal unitary similarity
/// makes the tridiagonal real). `a` is destroyed.
pub fn tridiagonalize_hermitian(n: usize, a: &mut [Complex64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut e = vec![0.0f64; n.saturating_sub(1)];
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for i in (1..n).rev() {
        let l = i;
        let mut scale = 0.0;
        for k in 0..l {
            scale += a[i * n + k].re.abs() + a[i * n + k].im.abs();
        }
        if scale == 0.0 {
            e[i - 1] = 0.0;
            continue;
        }
        let mut h = 0.0;
        for k in 0..l {
            // the reflector collapses the column a[0..l][i] = conj(row),
            // so u is built from the conjugated row
            let scaled = (a[i * n + k] / scale).conj();
            a[i * n + k] = scaled;
            h += scaled.norm_sqr();
        }
        let g = h.sqrt();
        e[i - 1] = scale * g;
        let last = a[i * n + l - 1];
        let f = last.norm();
        if f != 0.0 {
            // u_last = conj(x_last) (1 + g/f): reflect along the stored phase
            a[i * n + l - 1] = last * (1.0 + g / f);
            h += f * g;
        } else {
            // x_last = 0: u_last = g already leaves h = |u|^2 / 2
            a[i * n + l - 1] = Complex64::new(g, 0.0);
        }
        // p = A u / h over the leading block; lower triangle holds A[j][k], k <= j
        for j in 0..l {
            p[j] = a[j * n + j] * a[i * n + j];
        }
        for j in 1..l {
            let uj = a[i * n + j];
            let row = j * n;
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..j {
                let ajk = a[row + k];
                s += ajk * a[i * n + k];
                p[k] += ajk.conj() * uj;
            }
            p[j] += s;
        }
        let inv_h = 1.0 / h;
        let mut dot = Complex64::new(0.0, 0.0);
        for j in 0..l {
            p[j] *= inv_h;
            dot += a[i * n + j].conj() * p[j];
        }
        let kk = dot * (0.5 * inv_h);
        for j in 0..l {
            p[j] -= kk * a[i * n + j];
        }
        for j in 0..l {
            let uj = a[i * n + j];
            let qj = p[j];
            let row = j * n;
            for k in 0..=j {
                a[row + k] -= uj * p[k].conj() + qj * a[i * n + k].conj();
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|j| a[j * n + j].re).collect();
    (d, e)
}

/// Eigenvalues of a dense real symmetric matrix, ascending.
pub fn eigenvalues_dense_real(n: usize, mut a: Vec<f64>) -> Result<Vec<f64>, SolveError> {
    if n == 0 {
        return Err(SolveError::Empty);
    }
    let (d, e) = tridiagonalize_real(n, &mut a);
    eigenvalues_tridiagonal(&d, &e)
}

/// Eigenvalues of a dense complex Hermitian matrix, ascending.
pub fn eigenvalues_dense_hermitian(n: usize, mut a: Vec<Complex64>) -> Result<Vec<f64>, SolveError> {
    if n == 0 {
        return Err(SolveError::Empty);
    }
    let (d, e) = tridiagonalize_hermitian(n, &mut a);
    eigenvalues_tridiagonal(&d, &e)
}

/// Relative tolerance for collapsing Kramers-degenerate pairs of a
/// quaternion self-dual spectrum.
const PAIRING_REL_TOL: f64 = 1e-8;

fn collapse_kramers_pairs(values: Vec<f64>) -> Result<Vec<f64>, SolveError> {
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = PAIRING_REL_TOL * radius.max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(values.len() / 2);
    for (idx, pair) in values.chunks_exact(2).enumerate() {
        let gap = (pair[1] - pair[0]).abs();
        if gap > tol {
            return Err(SolveError::PairingFailure { index: idx, gap });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Computes the ordered, globally rescaled spectrum of a sample.
///
/// Raw eigenvalues live on `[-2, 2]` in the limit for every family (the
/// tridiagonal model after its `sqrt(2 / (beta n))` eigenvalue scaling);
/// the final division by 2 moves the support to `[-1, 1]`.
pub fn spectrum_of(sample: MatrixSample) -> Result<Spectrum, SolveError> {
    let spec = sample.spec;
    let mut values = match sample.storage {
        MatrixStorage::Tridiagonal { diag, offdiag } => {
            eigenvalues_tridiagonal(&diag, &offdiag)?
        }
        MatrixStorage::DenseReal { n, a } => eigenvalues_dense_real(n, a)?,
        MatrixStorage::DenseComplex { n, a } => eigenvalues_dense_hermitian(n, a)?,
        MatrixStorage::QuaternionEmbedded { n, a } => {
            let doubled = eigenvalues_dense_hermitian(2 * n, a)?;
            collapse_kramers_pairs(doubled)?
        }
    };
    let family_scale = match spec.family {
        Family::GaussianInvariant | Family::WignerIid => 1.0,
        Family::BetaTridiagonal => (2.0 / (spec.beta * spec.n as f64)).sqrt(),
    };
    let scale = 0.5 * family_scale;
    for v in &mut values {
        *v *= scale;
    }
    Ok(Spectrum { values, spec })
}
