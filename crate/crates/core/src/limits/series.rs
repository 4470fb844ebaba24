//! Alternating correlation series for gap probabilities and spacing laws.
//!
//! With rescaled correlations W_k (determinantal for beta = 2, Pfaffian for
//! beta = 1 and 4), the gap probability over (0, s) is
//!
//!   G(s) = 1 - s + sum_{k >= 2} (-1)^k I_k(s),
//!   I_k(s) = integral over 0 <= t_1 <= ... <= t_k <= s of W_k(t) dt,
//!
//! and the spacing distribution function conditions the first point at 0:
//!
//!   F(s) = sum_{k >= 2} (-1)^k J_k(s),
//!   J_k(s) = integral over 0 <= z_2 <= ... <= z_k <= s of W_k(0, z_2..z_k) dz.
//!
//! The density additionally pins the last coordinate at s. Successive
//! partial sums bracket the limit, so each truncated value ships with an
//! explicit enclosure.

use super::LimitsError;
use crate::kernels::w_k;
use crate::quadrature::gauss_legendre;

/// Per-axis Gauss-Legendre orders for simplex dimensions 1 through 9;
/// higher dimensions switch to Halton sampling.
const GL_ORDERS: [usize; 9] = [64, 48, 32, 20, 12, 8, 6, 4, 3];

const HALTON_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
const HALTON_SAMPLES: usize = 4096;
const HALTON_SKIP: u64 = 64;

/// Empirical envelope constant in the term bound C^k s^{k-1} (k-1)^{-(k-1)/2}.
const TERM_BOUND_C: f64 = 1.5;

const MAX_TERMS: usize = 16;

/// Truncated alternating series with an enclosure.
///
/// `lower` and `upper` are the last two partial sums; because the terms
/// alternate in sign and shrink, the limit lies between them once the
/// series has started contracting, up to the quadrature resolution of the
/// terms (around 1e-10). `truncation_bound` is the envelope bound on the
/// first omitted term.
#[derive(Clone, Copy, Debug)]
pub struct SeriesResult {
    pub value: f64,
    pub truncation_bound: f64,
    pub lower: f64,
    pub upper: f64,
}

fn check_args(beta: u8, s: f64, k_max: usize) -> Result<(), LimitsError> {
    if !matches!(beta, 1 | 2 | 4) {
        return Err(LimitsError::UnsupportedBeta(beta));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(LimitsError::BadArgument(format!("spacing length {s} must be finite and nonnegative")));
    }
    if !(2..=MAX_TERMS).contains(&k_max) {
        return Err(LimitsError::BadArgument(format!("k_max {k_max} outside 2..={MAX_TERMS}")));
    }
    Ok(())
}

fn term_bound(k: usize, s: f64) -> f64 {
    let km1 = (k - 1) as f64;
    TERM_BOUND_C.powi(k as i32) * s.powf(km1) / km1.powf(km1 / 2.0)
}

/// Integral of `f` over the ordered simplex 0 <= u_1 <= ... <= u_d <= s.
/// Dimension 0 is the empty product: `f(&[])`.
fn ordered_simplex_integral<F: Fn(&[f64]) -> f64>(d: usize, s: f64, f: &F) -> f64 {
    if d == 0 {
        return f(&[]);
    }
    if s <= 0.0 {
        return 0.0;
    }
    if d <= GL_ORDERS.len() {
        let (xi, wi) = gauss_legendre(GL_ORDERS[d - 1]);
        let mut point = vec![0.0; d];
        let mut sum = 0.0;
        gl_level(0, d, 0.0, s, 1.0, &xi, &wi, &mut point, f, &mut sum);
        sum
    } else {
        halton_simplex(d, s, f)
    }
}

#[allow(clippy::too_many_arguments)]
fn gl_level<F: Fn(&[f64]) -> f64>(
    level: usize,
    d: usize,
    lo: f64,
    s: f64,
    acc: f64,
    xi: &[f64],
    wi: &[f64],
    point: &mut Vec<f64>,
    f: &F,
    sum: &mut f64,
) {
    let half = 0.5 * (s - lo);
    let mid = 0.5 * (s + lo);
    for (t, w) in xi.iter().zip(wi) {
        let x = mid + half * t;
        point[level] = x;
        let weight = acc * w * half;
        if level + 1 == d {
            *sum += weight * f(point);
        } else {
            gl_level(level + 1, d, x, s, weight, xi, wi, point, f, sum);
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut scale = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        scale /= b;
        r += scale * (i % base) as f64;
        i /= base;
    }
    r
}

/// Quasi-Monte-Carlo fallback for high dimensions: Halton points scaled to
/// the cube [0, s]^d and sorted ascending. Sorting symmetrizes the
/// integrand, so the simplex integral is the cube average times s^d / d!;
/// the estimator has no Jacobian factor and stays as bounded as `f`.
fn halton_simplex<F: Fn(&[f64]) -> f64>(d: usize, s: f64, f: &F) -> f64 {
    assert!(d <= HALTON_PRIMES.len(), "simplex dimension {d} beyond prime table");
    let mut sum = 0.0;
    let mut point = vec![0.0; d];
    for idx in 0..HALTON_SAMPLES as u64 {
        let i = idx + HALTON_SKIP;
        for (dim, prime) in HALTON_PRIMES[..d].iter().enumerate() {
            point[dim] = s * radical_inverse(i, *prime);
        }
        point.sort_by(|a, b| a.partial_cmp(b).expect("halton points are finite"));
        sum += f(&point);
    }
    let mut cell = 1.0;
    for i in 1..=d {
        cell *= s / i as f64;
    }
    sum / HALTON_SAMPLES as f64 * cell
}

fn correlation(beta: u8, pts: &[f64]) -> f64 {
    w_k(beta, pts).expect("correlation is defined for validated beta and nonempty points").value
}

/// Gap probability G_beta(s) truncated after the k_max-th correlation term.
pub fn gap_series(beta: u8, s: f64, k_max: usize) -> Result<SeriesResult, LimitsError> {
    check_args(beta, s, k_max)?;
    let mut partial = 1.0 - s;
    let mut prev_partial = 1.0;
    for k in 2..=k_max {
        let term = ordered_simplex_integral(k, s, &|t: &[f64]| correlation(beta, t));
        prev_partial = partial;
        partial += if k % 2 == 0 { term } else { -term };
    }
    Ok(SeriesResult {
        value: partial,
        truncation_bound: term_bound(k_max + 1, s),
        lower: partial.min(prev_partial),
        upper: partial.max(prev_partial),
    })
}

/// Spacing distribution function F_beta(s) truncated after the k_max-th term.
pub fn spacing_cdf_series(beta: u8, s: f64, k_max: usize) -> Result<SeriesResult, LimitsError> {
    check_args(beta, s, k_max)?;
    let mut partial = 0.0;
    let mut prev_partial = 0.0;
    for k in 2..=k_max {
        let term = ordered_simplex_integral(k - 1, s, &|z: &[f64]| {
            let mut pts = Vec::with_capacity(k);
            pts.push(0.0);
            pts.extend_from_slice(z);
            correlation(beta, &pts)
        });
        prev_partial = partial;
        partial += if k % 2 == 0 { term } else { -term };
    }
    Ok(SeriesResult {
        value: partial,
        truncation_bound: term_bound(k_max + 1, s),
        lower: partial.min(prev_partial),
        upper: partial.max(prev_partial),
    })
}

/// Spacing density p_beta(s) truncated after the k_max-th term: both the
/// conditioning point 0 and the far endpoint s are pinned, leaving a
/// (k-2)-dimensional simplex per term.
pub fn spacing_density_series(beta: u8, s: f64, k_max: usize) -> Result<SeriesResult, LimitsError> {
    check_args(beta, s, k_max)?;
    let mut partial = 0.0;
    let mut prev_partial = 0.0;
    for k in 2..=k_max {
        let term = ordered_simplex_integral(k - 2, s, &|z: &[f64]| {
            let mut pts = Vec::with_capacity(k);
            pts.push(0.0);
            pts.extend_from_slice(z);
            pts.push(s);
            correlation(beta, &pts)
        });
        prev_partial = partial;
        partial += if k % 2 == 0 { term } else { -term };
    }
    Ok(SeriesResult {
        value: partial,
        truncation_bound: term_bound(k_max + 1, s),
        lower: partial.min(prev_partial),
        upper: partial.max(prev_partial),
    })
}
