//! Gap probability for beta = 2 through the sigma-form of Painleve V.
//!
//! The logarithmic derivative sigma(t) = t d/dt ln det(I - K on (0, t/pi))
//! obeys
//!
//!   (t sigma'')^2 + 4 (t sigma' - sigma) (t sigma' - sigma + sigma'^2) = 0
//!
//! with boundary behaviour sigma(t) = -t/pi - t^2/pi^2 - t^3/pi^3 + ... as
//! t -> 0. Solving the quadratic for sigma'' and taking the branch that
//! matches the expansion gives an explicit second-order ODE; integrating
//!
//!   G_2(s) = exp( integral_0^{pi s} sigma(t)/t dt )
//!
//! alongside it yields the gap probability, its derivative G' = G sigma/s,
//! and the spacing density G''. Dense output lands on a fixed grid so later
//! queries interpolate with cubic Hermite pieces fed by the exact slopes.

use super::LimitsError;

const T0: f64 = 1e-3;
const H_TABLE: f64 = 5e-3;
const T_MAX_LIMIT: f64 = 40.0;

// Boundary expansion sigma = A1 t + A2 t^2 + A3 t^3 + A4 t^4 + A5 t^5 + O(t^6).
// A4 and A5 follow from substituting the series into the sigma-form and
// matching the t^4 and t^5 coefficients.
fn coeffs() -> [f64; 5] {
    let pi = std::f64::consts::PI;
    [
        -1.0 / pi,
        -1.0 / (pi * pi),
        -1.0 / (pi * pi * pi),
        (pi * pi / 9.0 - 1.0) / pi.powi(4),
        (5.0 * pi * pi / 36.0 - 1.0) / pi.powi(5),
    ]
}

fn series_sigma(t: f64) -> f64 {
    let a = coeffs();
    t * (a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * a[4]))))
}

fn series_dsigma(t: f64) -> f64 {
    let a = coeffs();
    a[0] + t * (2.0 * a[1] + t * (3.0 * a[2] + t * (4.0 * a[3] + t * 5.0 * a[4])))
}

/// integral_0^t sigma(u)/u du evaluated on the boundary expansion.
fn series_q(t: f64) -> f64 {
    let a = coeffs();
    t * (a[0] + t * (a[1] / 2.0 + t * (a[2] / 3.0 + t * (a[3] / 4.0 + t * a[4] / 5.0))))
}

#[derive(Clone, Copy, Debug)]
struct Row {
    t: f64,
    sigma: f64,
    dsigma: f64,
    /// integral_{T0}^t sigma(u)/u du
    q: f64,
}

/// Tabulated sigma-form solution on [T0, t_max] with step H_TABLE.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    rows: Vec<Row>,
    q_prefix: f64,
}

type State = [f64; 3];

/// Right-hand side: state is (sigma, sigma', q). Returns the branch
/// sigma'' = -(2/t) sqrt(D), D = (t sigma' - sigma)(sigma - t sigma' - sigma'^2),
/// which is the root consistent with the boundary expansion; D must stay
/// nonnegative on the solution or the branch has been left.
fn deriv(t: f64, y: &State) -> Result<State, LimitsError> {
    let g = t * y[1] - y[0];
    let d = g * (-g - y[1] * y[1]);
    let scale = 1.0 + g * g + y[1].powi(4);
    if d < -1e-11 * scale {
        return Err(LimitsError::OdeFailure(format!("branch discriminant {d:e} negative at t={t}")));
    }
    let dd = d.max(0.0);
    Ok([y[1], -2.0 / t * dd.sqrt(), y[0] / t])
}

fn rk_step(t: f64, y: &State, h: f64) -> Result<(State, State), LimitsError> {
    let comb = |terms: &[(f64, &State)]| -> State {
        let mut out = *y;
        for (c, k) in terms {
            for i in 0..3 {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k1 = deriv(t, y)?;
    let k2 = deriv(t + h / 5.0, &comb(&[(1.0 / 5.0, &k1)]))?;
    let k3 = deriv(t + 3.0 * h / 10.0, &comb(&[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]))?;
    let k4 = deriv(t + 4.0 * h / 5.0, &comb(&[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]))?;
    let k5 = deriv(
        t + 8.0 * h / 9.0,
        &comb(&[
            (19372.0 / 6561.0, &k1),
            (-25360.0 / 2187.0, &k2),
            (64448.0 / 6561.0, &k3),
            (-212.0 / 729.0, &k4),
        ]),
    )?;
    let k6 = deriv(
        t + h,
        &comb(&[
            (9017.0 / 3168.0, &k1),
            (-355.0 / 33.0, &k2),
            (46732.0 / 5247.0, &k3),
            (49.0 / 176.0, &k4),
            (-5103.0 / 18656.0, &k5),
        ]),
    )?;
    let y5 = comb(&[
        (35.0 / 384.0, &k1),
        (500.0 / 1113.0, &k3),
        (125.0 / 192.0, &k4),
        (-2187.0 / 6784.0, &k5),
        (11.0 / 84.0, &k6),
    ]);
    let k7 = deriv(t + h, &y5)?;
    let y4 = comb(&[
        (5179.0 / 57600.0, &k1),
        (7571.0 / 16695.0, &k3),
        (393.0 / 640.0, &k4),
        (-92097.0 / 339200.0, &k5),
        (187.0 / 2100.0, &k6),
        (1.0 / 40.0, &k7),
    ]);
    let mut err = [0.0; 3];
    for i in 0..3 {
        err[i] = y5[i] - y4[i];
    }
    Ok((y5, err))
}

/// Integrate the sigma-form from the boundary expansion at t = 1e-3 out to
/// t_max, recording the state every 5e-3. `tol` is the per-step embedded
/// error tolerance (1e-12 to 1e-6).
pub fn painleve_sigma(t_max: f64, tol: f64) -> Result<SigmaTable, LimitsError> {
    if !(T0 + H_TABLE..=T_MAX_LIMIT).contains(&t_max) {
        return Err(LimitsError::BadArgument(format!("t_max {t_max} outside ({}, {T_MAX_LIMIT}]", T0 + H_TABLE)));
    }
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(LimitsError::BadArgument(format!("tolerance {tol} outside [1e-13, 1e-6]")));
    }
    let steps = ((t_max - T0) / H_TABLE).ceil() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut t = T0;
    let mut y: State = [series_sigma(T0), series_dsigma(T0), 0.0];
    rows.push(Row { t, sigma: y[0], dsigma: y[1], q: y[2] });
    let mut h = 1e-5f64;
    let mut evals = 0usize;
    for step in 1..=steps {
        let target = T0 + step as f64 * H_TABLE;
        while t < target - 1e-13 {
            let h_try = h.min(target - t);
            let (y_new, err) = rk_step(t, &y, h_try)?;
            evals += 1;
            if evals > 2_000_000 {
                return Err(LimitsError::OdeFailure("step budget exhausted".into()));
            }
            let norm: f64 = (0..3)
                .map(|i| {
                    let sc = tol + tol * y[i].abs().max(y_new[i].abs());
                    let e = err[i] / sc;
                    e * e
                })
                .sum::<f64>();
            let norm = (norm / 3.0).sqrt();
            if norm <= 1.0 {
                if !y_new.iter().all(|v| v.is_finite()) || y_new[1] >= 0.0 {
                    return Err(LimitsError::OdeFailure(format!("state left the expected branch at t={t}")));
                }
                t += h_try;
                y = y_new;
            }
            let factor = if norm > 0.0 { 0.9 * norm.powf(-0.2) } else { 5.0 };
            h = (h_try * factor.clamp(0.2, 5.0)).min(H_TABLE);
            if h < 1e-12 {
                return Err(LimitsError::OdeFailure(format!("step size collapsed at t={t}")));
            }
        }
        t = target;
        rows.push(Row { t, sigma: y[0], dsigma: y[1], q: y[2] });
    }
    Ok(SigmaTable { rows, q_prefix: series_q(T0) })
}

fn hermite(theta: f64, h: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + theta) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1
}

impl SigmaTable {
    pub fn t_max(&self) -> f64 {
        self.rows.last().expect("table is never empty").t
    }

    /// (sigma, sigma', integral_0^t sigma/u du) at any t in [0, t_max].
    pub fn query(&self, t: f64) -> Result<(f64, f64, f64), LimitsError> {
        if !t.is_finite() || t < 0.0 || t > self.t_max() + 1e-9 {
            return Err(LimitsError::BadArgument(format!("query point {t} outside [0, {}]", self.t_max())));
        }
        if t <= T0 {
            return Ok((series_sigma(t), series_dsigma(t), series_q(t)));
        }
        let idx = (((t - T0) / H_TABLE).floor() as usize).min(self.rows.len() - 2);
        let (r0, r1) = (&self.rows[idx], &self.rows[idx + 1]);
        let theta = ((t - r0.t) / H_TABLE).clamp(0.0, 1.0);
        let d2 = |r: &Row| -> f64 {
            let g = r.t * r.dsigma - r.sigma;
            -2.0 / r.t * (g * (-g - r.dsigma * r.dsigma)).max(0.0).sqrt()
        };
        let sigma = hermite(theta, H_TABLE, r0.sigma, r0.dsigma, r1.sigma, r1.dsigma);
        let dsigma = hermite(theta, H_TABLE, r0.dsigma, d2(r0), r1.dsigma, d2(r1));
        let q = hermite(theta, H_TABLE, r0.q, r0.sigma / r0.t, r1.q, r1.sigma / r1.t);
        Ok((sigma, dsigma, self.q_prefix + q))
    }
}

/// Gap probability G_2(s) with first and second derivatives; the latter two
/// are the survival function ingredient F = 1 + G' and the spacing density
/// p = G''. The table must extend past pi * s.
pub fn gap_painleve(table: &SigmaTable, s: f64) -> Result<(f64, f64, f64), LimitsError> {
    if !s.is_finite() || s < 0.0 {
        return Err(LimitsError::BadArgument(format!("spacing length {s} must be finite and nonnegative")));
    }
    if s == 0.0 {
        return Ok((1.0, -1.0, 0.0));
    }
    let pi = std::f64::consts::PI;
    let (sigma, dsigma, q) = table.query(pi * s)?;
    let g = q.exp();
    let g1 = g * sigma / s;
    let g2 = g * ((sigma / s).powi(2) + pi * dsigma / s - sigma / (s * s));
    Ok((g, g1, g2))
}
