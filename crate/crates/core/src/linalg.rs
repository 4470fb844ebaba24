//! Small dense real matrices: storage and LU determinants.
//!
//! Sizes here are modest (quadrature discretizations and correlation
//! determinants, n up to a few hundred), so a plain row-major buffer with
//! partial-pivoting elimination is all that is needed.

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    /// Determinant by LU with partial pivoting; consumes a working copy.
    pub fn det(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.a.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn det_matches_closed_forms() {
        let m = Mat::from_fn(2, |i, j| [[3.0, 1.0], [4.0, 2.0]][i][j]);
        assert_relative_eq!(m.det(), 2.0, epsilon = 1e-14);

        let m3 = Mat::from_fn(3, |i, j| [[2.0, 0.0, 1.0], [1.0, 3.0, 2.0], [1.0, 1.0, 1.0]][i][j]);
        // cofactor expansion: 2*(3-2) - 0 + 1*(1-3) = 0
        assert_relative_eq!(m3.det(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn det_of_identity_and_permutation() {
        let id = Mat::from_fn(5, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_relative_eq!(id.det(), 1.0);
        // single transposition has determinant -1
        let p = Mat::from_fn(4, |i, j| {
            let map = [1usize, 0, 2, 3];
            if map[i] == j {
                1.0
            } else {
                0.0
            }
        });
        assert_relative_eq!(p.det(), -1.0);
    }

    #[test]
    fn det_is_multiplicative_on_random_pairs() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(9);
        for n in [2usize, 3, 5, 8] {
            let a = Mat::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let b = Mat::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let mut prod = Mat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += a.get(i, k) * b.get(k, j);
                    }
                    prod.set(i, j, s);
                }
            }
            assert_relative_eq!(prod.det(), a.det() * b.det(), max_relative = 1e-10);
        }
    }
}
