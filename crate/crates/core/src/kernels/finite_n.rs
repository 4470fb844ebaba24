//! Finite-size GUE correlation kernel for the weight exp(-N x^2 / 2).
//!
//! K_N(x,y) = sum_{j<N} phi_j(x) phi_j(y) where phi_j are the orthonormal
//! weighted polynomials. In oscillator form phi_j(x) = (N/2)^{1/4}
//! psi_j(x sqrt(N/2)) with the Hermite functions psi_j, so everything is
//! driven by the three-term recurrence
//! psi_{j+1} = t sqrt(2/(j+1)) psi_j - sqrt(j/(j+1)) psi_{j-1}.
//! The recurrence starts at psi_0 ~ exp(-t^2/2), which underflows f64 for
//! N around 10^3 away from the centre, so mantissas carry a separate
//! power-of-two exponent.

use super::{CorrelationValue, KernelError};
use crate::linalg::Mat;

const MAX_N: usize = 2000;

/// Equilibrium eigenvalue density for the exp(-N x^2 / 2) weight:
/// sqrt(4 - x^2) / (2 pi) on [-2, 2].
pub fn bulk_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// m * 2^e without intermediate overflow; underflow rounds to zero.
fn scale_by_pow2(m: f64, e: i64) -> f64 {
    if m == 0.0 || e == 0 {
        return m;
    }
    if e < -2200 {
        return 0.0;
    }
    if e > 2200 {
        return f64::INFINITY * m.signum();
    }
    let h = e / 2;
    m * 2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
}

/// Oscillator-function recurrence state: mantissas of psi_{j-1}, psi_j
/// sharing one power-of-two exponent.
struct OscState {
    t: f64,
    prev: f64,
    cur: f64,
    exp: i64,
}

impl OscState {
    fn start(t: f64) -> Self {
        // psi_0 = pi^{-1/4} exp(-t^2/2), stored as mantissa * 2^exp
        let log2 = -t * t / (2.0 * std::f64::consts::LN_2)
            - 0.25 * std::f64::consts::PI.ln() / std::f64::consts::LN_2;
        let e0 = log2.floor();
        OscState { t, prev: 0.0, cur: (log2 - e0).exp2(), exp: e0 as i64 }
    }

    /// (psi_{j-1}, psi_j) -> (psi_j, psi_{j+1})
    fn advance(&mut self, j: usize) {
        let jf = j as f64;
        let next = self.t * (2.0 / (jf + 1.0)).sqrt() * self.cur
            - (jf / (jf + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        let mag = self.prev.abs().max(self.cur.abs());
        if mag > 2f64.powi(500) {
            self.prev *= 2f64.powi(-512);
            self.cur *= 2f64.powi(-512);
            self.exp += 512;
        } else if mag > 0.0 && mag < 2f64.powi(-500) {
            self.prev *= 2f64.powi(512);
            self.cur *= 2f64.powi(512);
            self.exp -= 512;
        }
    }

    fn materialized(&self) -> (f64, f64) {
        (scale_by_pow2(self.prev, self.exp), scale_by_pow2(self.cur, self.exp))
    }
}

/// Finite-size GUE kernel of fixed matrix size.
#[derive(Clone, Copy, Debug)]
pub struct GueKernel {
    n: usize,
}

impl GueKernel {
    pub fn new(n: usize) -> Result<Self, KernelError> {
        if n == 0 || n > MAX_N {
            return Err(KernelError::SizeOutOfRange { n, max: MAX_N });
        }
        Ok(GueKernel { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// K_N(x, y) by the direct j-sum; stable at and near the diagonal.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let c = (self.n as f64 / 2.0).sqrt();
        let mut a = OscState::start(x * c);
        let mut b = OscState::start(y * c);
        let mut sum = scale_by_pow2(a.cur * b.cur, a.exp + b.exp);
        for j in 0..self.n - 1 {
            a.advance(j);
            b.advance(j);
            sum += scale_by_pow2(a.cur * b.cur, a.exp + b.exp);
        }
        c * sum
    }

    /// K_N(x, y) in Christoffel-Darboux form; x must differ from y.
    /// Loses accuracy as x -> y (explicit cancellation); the cross-check
    /// route for the j-sum.
    pub fn eval_cd(&self, x: f64, y: f64) -> f64 {
        let c = (self.n as f64 / 2.0).sqrt();
        let (am1, an) = self.pair(x * c);
        let (bm1, bn) = self.pair(y * c);
        c * (an * bm1 - am1 * bn) / (x - y)
    }

    /// (psi_{n-1}(t), psi_n(t))
    fn pair(&self, t: f64) -> (f64, f64) {
        let mut st = OscState::start(t);
        for j in 0..self.n {
            st.advance(j);
        }
        st.materialized()
    }

    /// Kernel rescaled about a bulk point a: both arguments mapped through
    /// u -> a + u / (N rho(a)) and the value divided by N rho(a). Converges
    /// to the sine kernel as N grows.
    pub fn eval_rescaled(&self, a: f64, u: f64, v: f64) -> Result<f64, KernelError> {
        let rho = bulk_density(a);
        if rho <= 0.0 {
            return Err(KernelError::BadBulkPoint(a));
        }
        let scale = self.n as f64 * rho;
        Ok(self.eval(a + u / scale, a + v / scale) / scale)
    }
}

/// Rescaled kernel value K_N(x, y) / (N rho(a)) in the original coordinates.
pub fn finite_n_gue_kernel(n: usize, a: f64, x: f64, y: f64) -> Result<f64, KernelError> {
    let rho = bulk_density(a);
    if rho <= 0.0 {
        return Err(KernelError::BadBulkPoint(a));
    }
    Ok(GueKernel::new(n)?.eval(x, y) / (n as f64 * rho))
}

/// Rescaled k-point correlation: determinant of the rescaled kernel matrix
/// over points given in the local coordinate about a.
pub fn b_nk_gue(n: usize, a: f64, points: &[f64]) -> Result<CorrelationValue, KernelError> {
    let k = points.len();
    if k == 0 {
        return Err(KernelError::EmptyPoints);
    }
    if k > n {
        return Err(KernelError::SizeOutOfRange { n: k, max: n });
    }
    let kernel = GueKernel::new(n)?;
    let mut m = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, kernel.eval_rescaled(a, points[i], points[j])?);
        }
    }
    Ok(CorrelationValue { k, beta: 2, value: m.det() })
}
