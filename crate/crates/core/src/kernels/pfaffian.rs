//! Pfaffian of an even-dimensional skew-symmetric matrix.

use thiserror::Error;

use crate::linalg::Mat;

#[derive(Debug, Error)]
pub enum PfaffianError {
    #[error("pfaffian needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric: max |A + A^T| = {deviation:e}, allowed {allowed:e}")]
    NotSkew { deviation: f64, allowed: f64 },
}

/// Pfaffian by congruence elimination (Parlett-Reid style) with partial
/// pivoting, O(n^3). Each step zeroes row k beyond column k+1 with a
/// unit-determinant congruence, so Pf accumulates as the product of the
/// (k, k+1) pivots, with a sign flip per row/column swap.
///
/// Input must be skew-symmetric to max |A + A^T| <= 1e-10 * max |A|;
/// Pf of the empty matrix is 1.
pub fn pfaffian(a: &Mat) -> Result<f64, PfaffianError> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(PfaffianError::OddDimension(n));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut norm = 0.0f64;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            norm = norm.max(a.get(i, j).abs());
            dev = dev.max((a.get(i, j) + a.get(j, i)).abs());
        }
    }
    let allowed = 1e-10 * norm.max(f64::MIN_POSITIVE);
    if dev > allowed {
        return Err(PfaffianError::NotSkew { deviation: dev, allowed });
    }

    let mut m: Vec<f64> = (0..n * n).map(|idx| a.get(idx / n, idx % n)).collect();
    let mut pf = 1.0f64;
    for k in (0..n - 1).step_by(2) {
        let mut p = k + 1;
        let mut best = m[k * n + p].abs();
        for j in k + 2..n {
            if m[k * n + j].abs() > best {
                best = m[k * n + j].abs();
                p = j;
            }
        }
        if best == 0.0 {
            return Ok(0.0);
        }
        if p != k + 1 {
            for j in 0..n {
                m.swap(p * n + j, (k + 1) * n + j);
            }
            for i in 0..n {
                m.swap(i * n + p, i * n + k + 1);
            }
            pf = -pf;
        }
        let pivot = m[k * n + k + 1];
        pf *= pivot;
        // congruence adding -tau_i times row/col k+1 to row/col i keeps the
        // trailing block skew and zeroes row k beyond k+1
        for i in k + 2..n {
            let tau = m[k * n + i] / pivot;
            if tau == 0.0 {
                continue;
            }
            for j in k + 2..n {
                m[i * n + j] -= tau * m[(k + 1) * n + j];
            }
        }
        for j in k + 2..n {
            let tau = m[k * n + j] / pivot;
            if tau == 0.0 {
                continue;
            }
            for i in k + 2..n {
                m[i * n + j] += tau * m[(k + 1) * n + i];
            }
        }
    }
    Ok(pf)
}
