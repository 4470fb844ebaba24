//! Sine kernel, 2×2 matrix kernels for the orthogonal and symplectic
//! symmetry classes, correlation determinants/Pfaffians W_k, and the
//! finite-size GUE kernel.

pub mod finite_n;
pub mod pfaffian;

pub use finite_n::{b_nk_gue, bulk_density, finite_n_gue_kernel, GueKernel};
pub use pfaffian::{pfaffian, PfaffianError};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::Mat;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("matrix kernels exist for beta 1 and 4, correlations for 1, 2, 4; got {0}")]
    UnsupportedBeta(u8),
    #[error("correlation needs at least one point")]
    EmptyPoints,
    #[error("kernel matrix times J is not skew-symmetric (relative deviation {0:e}); kernel entry bug")]
    SkewCheckFailed(f64),
    #[error("matrix dimension {n} out of supported range (max {max})")]
    SizeOutOfRange { n: usize, max: usize },
    #[error("bulk point {0} lies outside the open spectral support (-2, 2)")]
    BadBulkPoint(f64),
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
}

/// Switch to the Taylor branch below this |x - y|; both branches agree to
/// 1e-14 at the seam.
const SINC_TAYLOR_RADIUS: f64 = 1e-4;

fn sinc_pi(u: f64) -> f64 {
    let z = std::f64::consts::PI * u;
    if u.abs() < SINC_TAYLOR_RADIUS {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

fn sinc_pi_deriv(u: f64) -> f64 {
    if u.abs() < SINC_TAYLOR_RADIUS {
        let p2 = std::f64::consts::PI * std::f64::consts::PI;
        let u2 = u * u;
        u * p2 * (-1.0 / 3.0 + p2 * u2 / 30.0 - p2 * p2 * u2 * u2 / 840.0)
    } else {
        let z = std::f64::consts::PI * u;
        z.cos() / u - z.sin() / (std::f64::consts::PI * u * u)
    }
}

/// Sine kernel sin(π(x−y)) / (π(x−y)); value 1 on the diagonal.
pub fn sine_kernel(x: f64, y: f64) -> f64 {
    sinc_pi(x - y)
}

/// ∂/∂x of the sine kernel; an odd function of x − y.
pub fn sine_kernel_dx(x: f64, y: f64) -> f64 {
    sinc_pi_deriv(x - y)
}

/// Sine integral Si(z) = ∫₀ᶻ sin(t)/t dt, absolute error below 1e-12.
///
/// Power series up to |z| = 6; beyond that a continued fraction for the
/// exponential integral E₁(iz) evaluated by the modified Lentz method (the
/// classical asymptotic expansion cannot reach 1e-12 near z = 6, the
/// continued fraction converges for every z > 0).
pub fn sine_integral(z: f64) -> f64 {
    if z < 0.0 {
        return -sine_integral(-z);
    }
    if z <= 6.0 {
        si_series(z)
    } else {
        si_continued_fraction(z)
    }
}

fn si_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for k in 0..120usize {
        let k2 = (2 * k) as f64;
        // t_{k+1} = -t_k z^2 (2k+1) / ((2k+2)(2k+3)^2)
        term *= -z2 * (k2 + 1.0) / ((k2 + 2.0) * (k2 + 3.0) * (k2 + 3.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

fn si_continued_fraction(z: f64) -> f64 {
    const EPS_SQR: f64 = 1e-32;
    const TINY: f64 = 1e-290;
    // reciprocal via norm_sqr; Complex::finv and Complex::norm go through
    // hypot, which dominates the runtime of this loop. Iterates stay within
    // [1/TINY, O(z)], so the squared norm neither overflows into a wrong
    // answer (1/inf = 0 is the limit the TINY seed wants) nor underflows.
    #[inline]
    fn inv(w: Complex64) -> Complex64 {
        let r = 1.0 / w.norm_sqr();
        Complex64::new(w.re * r, -w.im * r)
    }
    let mut b = Complex64::new(1.0, z);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = inv(b);
    let mut h = d;
    for i in 2..=300 {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += Complex64::new(2.0, 0.0);
        d = inv(a * d + b);
        c = b + a * inv(c);
        let del = c * d;
        h *= del;
        if (del - 1.0).norm_sqr() < EPS_SQR {
            break;
        }
    }
    h *= Complex64::new(z.cos(), -z.sin());
    std::f64::consts::FRAC_PI_2 + h.im
}

fn sgn(u: f64) -> f64 {
    if u > 0.0 {
        1.0
    } else if u < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The four entries of the 2×2 matrix kernel
/// K_β(x,y) = [[S(x,y), D(x,y)], [I(x,y), S(y,x)]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixKernelValue {
    pub s: f64,
    pub d: f64,
    pub i: f64,
    pub st: f64,
}

/// Matrix kernel entries for the orthogonal (beta = 1) and symplectic
/// (beta = 4) classes. S is even and D, I odd in x − y; sgn(0) := 0 makes
/// the diagonal I entry vanish.
pub fn matrix_kernel(beta: u8, x: f64, y: f64) -> Result<MatrixKernelValue, KernelError> {
    let u = x - y;
    let pi = std::f64::consts::PI;
    match beta {
        1 => Ok(MatrixKernelValue {
            s: sinc_pi(u),
            d: sinc_pi_deriv(u),
            i: sine_integral(pi * u) / pi - 0.5 * sgn(u),
            st: sinc_pi(-u),
        }),
        4 => Ok(MatrixKernelValue {
            s: sinc_pi(2.0 * u),
            d: 2.0 * sinc_pi_deriv(2.0 * u),
            i: sine_integral(2.0 * pi * u) / (2.0 * pi),
            st: sinc_pi(-2.0 * u),
        }),
        other => Err(KernelError::UnsupportedBeta(other)),
    }
}

/// A k-point correlation value (a W_k or B_{N,k}) together with its order
/// and symmetry class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationValue {
    pub k: usize,
    pub beta: u8,
    pub value: f64,
}

/// Limit k-point correlation W_k^{(β)}.
///
/// beta = 2: determinant of the k×k sine-kernel matrix. beta = 1, 4:
/// Pfaffian of the 2k×2k matrix (K_β(t_i,t_j))·J with J = diag(σ,…,σ),
/// σ = [[0,1],[−1,0]]; the product is checked numerically skew-symmetric
/// (relative 1e-8) before the Pfaffian, which pins the evenness of the
/// S entry (the oddness of D and I enters the mirrored block fill by
/// construction).
pub fn w_k(beta: u8, points: &[f64]) -> Result<CorrelationValue, KernelError> {
    let k = points.len();
    if k == 0 {
        return Err(KernelError::EmptyPoints);
    }
    let value = match beta {
        2 => Mat::from_fn(k, |i, j| sine_kernel(points[i], points[j])).det(),
        1 | 4 => {
            let m = kernel_times_j(beta, points)?;
            check_skew(&m, 1e-8)?;
            pfaffian(&m)?
        }
        other => return Err(KernelError::UnsupportedBeta(other)),
    };
    Ok(CorrelationValue { k, beta, value })
}

/// 2k×2k matrix (K_β(t_i,t_j))·J; block (i,j) is [[−D, S],[−S(y,x), I]].
///
/// Only the blocks with j >= i are evaluated; S even and D, I odd in x − y
/// determine the (j, i) block from the (i, j) one, halving the sine-integral
/// evaluations that dominate the entry cost.
fn kernel_times_j(beta: u8, points: &[f64]) -> Result<Mat, KernelError> {
    let k = points.len();
    let mut m = Mat::zeros(2 * k);
    for i in 0..k {
        for j in i..k {
            let kv = matrix_kernel(beta, points[i], points[j])?;
            m.set(2 * i, 2 * j, -kv.d);
            m.set(2 * i, 2 * j + 1, kv.s);
            m.set(2 * i + 1, 2 * j, -kv.st);
            m.set(2 * i + 1, 2 * j + 1, kv.i);
            if j > i {
                m.set(2 * j, 2 * i, kv.d);
                m.set(2 * j, 2 * i + 1, kv.st);
                m.set(2 * j + 1, 2 * i, -kv.s);
                m.set(2 * j + 1, 2 * i + 1, -kv.i);
            }
        }
    }
    Ok(m)
}

fn check_skew(m: &Mat, rel_tol: f64) -> Result<(), KernelError> {
    let n = m.n();
    let mut norm = 0.0f64;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            norm = norm.max(m.get(i, j).abs());
            dev = dev.max((m.get(i, j) + m.get(j, i)).abs());
        }
    }
    if dev > rel_tol * norm.max(f64::MIN_POSITIVE) {
        return Err(KernelError::SkewCheckFailed(dev / norm));
    }
    Ok(())
}
