//! Tabulated spacing laws with interpolation, plus the Wigner surmise.
//!
//! The exact beta = 2 law comes from the Painleve route; beta = 1 and 4
//! come from the Pfaffian correlation series up to a switch point and the
//! Wigner surmise beyond it, where both are accurate far past the needed
//! precision. The surmise alone is available as a cheap approximate mode.

use super::painleve::{gap_painleve, painleve_sigma};
use super::series::{spacing_cdf_series, spacing_density_series};
use super::LimitsError;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_lr};
use std::path::Path;

/// Density of the Wigner surmise a s^beta exp(-b s^2), normalized to unit
/// mass and unit mean.
pub fn wigner_surmise(beta: u8, s: f64) -> Result<f64, LimitsError> {
    let (a, b) = surmise_constants(beta)?;
    if !s.is_finite() || s < 0.0 {
        return Err(LimitsError::BadArgument(format!("spacing length {s} must be finite and nonnegative")));
    }
    Ok(a * s.powi(beta as i32) * (-b * s * s).exp())
}

/// Distribution function of the Wigner surmise: the regularized lower
/// incomplete gamma P((beta+1)/2, b s^2).
pub fn wigner_surmise_cdf(beta: u8, s: f64) -> Result<f64, LimitsError> {
    let (_, b) = surmise_constants(beta)?;
    if !s.is_finite() || s < 0.0 {
        return Err(LimitsError::BadArgument(format!("spacing length {s} must be finite and nonnegative")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_lr((beta as f64 + 1.0) / 2.0, b * s * s))
}

fn surmise_constants(beta: u8) -> Result<(f64, f64), LimitsError> {
    if beta == 0 {
        return Err(LimitsError::UnsupportedBeta(beta));
    }
    let bf = beta as f64;
    let b = (gamma((bf + 2.0) / 2.0) / gamma((bf + 1.0) / 2.0)).powi(2);
    let a = 2.0 * b.powf((bf + 1.0) / 2.0) / gamma((bf + 1.0) / 2.0);
    Ok((a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawMode {
    Exact,
    Surmise,
}

impl LawMode {
    pub fn slug(&self) -> &'static str {
        match self {
            LawMode::Exact => "exact",
            LawMode::Surmise => "surmise",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    FredholmPainleve,
    PfaffianSeries,
    WignerSurmise,
}

/// Spacing distribution tabulated on a uniform grid from 0 to s_max.
/// `cdf` and `density` are parallel to `grid`; `err_estimate` bounds the
/// construction error (truncation bracket width, tail stitch jump, and
/// any monotonicity clamping).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitLaw {
    pub beta: u8,
    pub method: LimitMethod,
    pub step: f64,
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub density: Vec<f64>,
    pub err_estimate: f64,
}

const SWITCH_POINT: f64 = 4.0;

fn series_terms_for(s: f64) -> usize {
    if s <= 1.0 {
        6
    } else if s <= 2.0 {
        8
    } else if s <= 3.0 {
        10
    } else {
        12
    }
}

/// Build the spacing law for beta in {1, 2, 4} on [0, s_max].
pub fn limit_law(beta: u8, s_max: f64, mode: LawMode) -> Result<LimitLaw, LimitsError> {
    if !matches!(beta, 1 | 2 | 4) {
        return Err(LimitsError::UnsupportedBeta(beta));
    }
    if !(2.0..=12.0).contains(&s_max) {
        return Err(LimitsError::BadArgument(format!("s_max {s_max} outside [2, 12]")));
    }
    let law = match mode {
        LawMode::Surmise => build_surmise(beta, s_max)?,
        LawMode::Exact if beta == 2 => build_painleve(s_max)?,
        LawMode::Exact => build_series(beta, s_max)?,
    };
    law.validate()?;
    Ok(law)
}

fn build_grid(s_max: f64, step: f64) -> Vec<f64> {
    let n = (s_max / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

fn build_surmise(beta: u8, s_max: f64) -> Result<LimitLaw, LimitsError> {
    let step = 0.02;
    let grid = build_grid(s_max, step);
    let cdf = grid.iter().map(|&s| wigner_surmise_cdf(beta, s)).collect::<Result<_, _>>()?;
    let density = grid.iter().map(|&s| wigner_surmise(beta, s)).collect::<Result<_, _>>()?;
    Ok(LimitLaw {
        beta,
        method: LimitMethod::WignerSurmise,
        step,
        grid,
        cdf,
        density,
        // known sup distance from the exact laws
        err_estimate: 0.01,
    })
}

fn build_painleve(s_max: f64) -> Result<LimitLaw, LimitsError> {
    let step = 0.02;
    let grid = build_grid(s_max, step);
    let table = painleve_sigma(std::f64::consts::PI * s_max + 0.05, 1e-10)?;
    let mut cdf = Vec::with_capacity(grid.len());
    let mut density = Vec::with_capacity(grid.len());
    let mut adjustment = 0.0f64;
    let mut running = 0.0f64;
    for &s in &grid {
        let (_, g1, g2) = gap_painleve(&table, s)?;
        let f = (1.0 + g1).clamp(0.0, 1.0);
        adjustment = adjustment.max(running - f).max(-g2.min(0.0));
        running = running.max(f);
        cdf.push(running);
        density.push(g2.max(0.0));
    }
    Ok(LimitLaw {
        beta: 2,
        method: LimitMethod::FredholmPainleve,
        step,
        grid,
        cdf,
        density,
        err_estimate: (1e-8f64).max(adjustment),
    })
}

fn build_series(beta: u8, s_max: f64) -> Result<LimitLaw, LimitsError> {
    let step = 0.05;
    let grid = build_grid(s_max, step);
    let switch = SWITCH_POINT.min(s_max);
    let mut cdf = Vec::with_capacity(grid.len());
    let mut density = Vec::with_capacity(grid.len());
    let mut err = 1e-6f64;
    let mut stitch = 0.0f64;
    let mut running = 0.0f64;
    for &s in &grid {
        let (f_raw, p_raw) = if s <= switch {
            let k_max = series_terms_for(s);
            let f = spacing_cdf_series(beta, s, k_max)?;
            let p = spacing_density_series(beta, s, k_max)?;
            err = err.max(f.upper - f.lower).max(p.upper - p.lower);
            (f.value, p.value)
        } else {
            (wigner_surmise_cdf(beta, s)?, wigner_surmise(beta, s)?)
        };
        if s > switch && stitch == 0.0 {
            // first tail point: record the jump against the series route
            let k_max = series_terms_for(switch);
            let f_series = spacing_cdf_series(beta, s, k_max)?.value;
            stitch = (f_series - f_raw).abs();
        }
        let f = f_raw.clamp(0.0, 1.0);
        running = running.max(f);
        cdf.push(running);
        density.push(p_raw.max(0.0));
    }
    Ok(LimitLaw {
        beta,
        method: LimitMethod::PfaffianSeries,
        step,
        grid,
        cdf,
        density,
        err_estimate: err.max(stitch),
    })
}

impl LimitLaw {
    pub fn s_max(&self) -> f64 {
        *self.grid.last().expect("law grid is never empty")
    }

    /// Structural soundness: uniform grid, distribution-function shape,
    /// density nonnegative, and nearly full mass when the grid reaches 6.
    pub fn validate(&self) -> Result<(), LimitsError> {
        let n = self.grid.len();
        if n < 3 || self.cdf.len() != n || self.density.len() != n {
            return Err(LimitsError::Cache("ragged law table".into()));
        }
        for (i, &s) in self.grid.iter().enumerate() {
            if (s - i as f64 * self.step).abs() > 1e-9 {
                return Err(LimitsError::Cache("grid is not uniform".into()));
            }
        }
        if self.cdf[0].abs() > 1e-9 {
            return Err(LimitsError::Cache(format!("distribution starts at {}", self.cdf[0])));
        }
        for w in self.cdf.windows(2) {
            if w[1] < w[0] - 1e-12 || w[1] > 1.0 + 1e-9 {
                return Err(LimitsError::Cache("distribution is not monotone in [0, 1]".into()));
            }
        }
        if self.density.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(LimitsError::Cache("density has negative or non-finite entries".into()));
        }
        if self.s_max() >= 6.0 - 1e-9 && *self.cdf.last().unwrap() < 0.999 {
            return Err(LimitsError::Cache(format!("mass {} at s_max", self.cdf.last().unwrap())));
        }
        Ok(())
    }

    /// Distribution function by cubic Hermite interpolation with the
    /// tabulated density as slope; clamped to the last value beyond s_max,
    /// where the missing mass is below 1e-9 for the supported betas.
    pub fn cdf_at(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let last = *self.cdf.last().unwrap();
        if s >= self.s_max() {
            return last;
        }
        let idx = ((s / self.step).floor() as usize).min(self.grid.len() - 2);
        let theta = (s - self.grid[idx]) / self.step;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.cdf[idx]
            + (t3 - 2.0 * t2 + theta) * self.step * self.density[idx]
            + (-2.0 * t3 + 3.0 * t2) * self.cdf[idx + 1]
            + (t3 - t2) * self.step * self.density[idx + 1];
        v.clamp(0.0, 1.0)
    }

    /// Density by linear interpolation; zero outside the table.
    pub fn density_at(&self, s: f64) -> f64 {
        if s < 0.0 || s > self.s_max() {
            return 0.0;
        }
        let idx = ((s / self.step).floor() as usize).min(self.grid.len() - 2);
        let theta = (s - self.grid[idx]) / self.step;
        self.density[idx] * (1.0 - theta) + self.density[idx + 1] * theta
    }

    /// Mean spacing, composite Simpson on the tabulated density.
    pub fn mean(&self) -> f64 {
        let f: Vec<f64> = self.grid.iter().zip(&self.density).map(|(s, p)| s * p).collect();
        simpson_uniform(&f, self.step)
    }
}

impl crate::spacings::Cdf for LimitLaw {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_at(x)
    }
}

fn simpson_uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    assert!(n >= 3, "need at least one Simpson panel");
    let pairs = (n - 1) / 2;
    let mut total = 0.0;
    for p in 0..pairs {
        let i = 2 * p;
        total += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    if (n - 1) % 2 == 1 {
        total += h / 2.0 * (f[n - 2] + f[n - 1]);
    }
    total
}

/// Like [`limit_law`] but backed by a JSON table cache in `dir`; unreadable
/// or stale entries are rebuilt and overwritten.
pub fn limit_law_cached(dir: &Path, beta: u8, s_max: f64, mode: LawMode) -> Result<LimitLaw, LimitsError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("spacing-law-v1-b{beta}-s{s_max:.2}-{}.json", mode.slug()));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(law) = serde_json::from_slice::<LimitLaw>(&bytes) {
            if law.beta == beta && (law.s_max() - s_max).abs() < 1e-9 && law.validate().is_ok() {
                return Ok(law);
            }
        }
    }
    let law = limit_law(beta, s_max, mode)?;
    let tmp = path.with_extension("tmp");
    let bytes = serde_json::to_vec(&law).map_err(|e| LimitsError::Cache(e.to_string()))?;
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, &path)?;
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::gap_fredholm;
    use crate::quadrature::integrate_panels;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn exact_beta2() -> &'static LimitLaw {
        static LAW: OnceLock<LimitLaw> = OnceLock::new();
        LAW.get_or_init(|| limit_law(2, 6.0, LawMode::Exact).unwrap())
    }

    fn exact_beta1() -> &'static LimitLaw {
        static LAW: OnceLock<LimitLaw> = OnceLock::new();
        LAW.get_or_init(|| limit_law(1, 6.0, LawMode::Exact).unwrap())
    }

    #[test]
    fn surmise_closed_form_for_orthogonal_symmetry() {
        let pi = std::f64::consts::PI;
        for &s in &[0.3, 1.0, 2.5] {
            assert_abs_diff_eq!(
                wigner_surmise(1, s).unwrap(),
                pi / 2.0 * s * (-pi * s * s / 4.0).exp(),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                wigner_surmise_cdf(1, s).unwrap(),
                1.0 - (-pi * s * s / 4.0).exp(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn surmise_has_unit_mass_and_unit_mean() {
        for &beta in &[1u8, 2, 4] {
            let mass = integrate_panels(|s| wigner_surmise(beta, s).unwrap(), 0.0, 10.0, 200, 12);
            let mean = integrate_panels(|s| s * wigner_surmise(beta, s).unwrap(), 0.0, 10.0, 200, 12);
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn unitary_law_is_a_valid_distribution_with_unit_mean() {
        let law = exact_beta2();
        law.validate().unwrap();
        assert_eq!(law.cdf_at(0.0), 0.0);
        assert!(law.cdf_at(100.0) >= 0.999);
        assert_abs_diff_eq!(law.mean(), 1.0, epsilon = 2e-3);
    }

    #[test]
    fn unitary_law_matches_independent_determinant_derivative() {
        let h = 1e-4;
        for &s in &[0.5, 1.0, 2.0] {
            let df = (gap_fredholm(s + h, 40).unwrap() - gap_fredholm(s - h, 40).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(exact_beta2().cdf_at(s), 1.0 + df, epsilon = 1e-5);
        }
    }

    #[test]
    fn orthogonal_law_is_sound_and_close_to_surmise() {
        let law = exact_beta1();
        law.validate().unwrap();
        assert!(law.err_estimate < 1e-3, "err estimate {}", law.err_estimate);
        assert_abs_diff_eq!(law.mean(), 1.0, epsilon = 1e-2);
        let mut sup = 0.0f64;
        for i in 0..=60 {
            let s = 0.1 * i as f64;
            sup = sup.max((law.cdf_at(s) - wigner_surmise_cdf(1, s).unwrap()).abs());
        }
        assert!(sup < 0.01, "sup deviation {sup}");
    }

    #[test]
    fn repulsion_strength_orders_the_laws_at_small_spacing() {
        let f1 = exact_beta1().cdf_at(0.5);
        let f2 = exact_beta2().cdf_at(0.5);
        let f4 = limit_law(4, 6.0, LawMode::Surmise).unwrap().cdf_at(0.5);
        assert!(f1 > f2 && f2 > f4, "F1={f1} F2={f2} F4={f4}");
    }

    #[test]
    fn density_integrates_to_distribution_increments() {
        let law = exact_beta2();
        let inc = integrate_panels(|s| law.density_at(s), 0.5, 1.5, 50, 10);
        assert_abs_diff_eq!(inc, law.cdf_at(1.5) - law.cdf_at(0.5), epsilon = 1e-3);
    }

    #[test]
    fn cache_round_trips_and_survives_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let built = limit_law_cached(dir.path(), 2, 6.0, LawMode::Surmise).unwrap();
        let reread = limit_law_cached(dir.path(), 2, 6.0, LawMode::Surmise).unwrap();
        assert_eq!(built.cdf, reread.cdf);
        assert_eq!(built.grid, reread.grid);
        let path = dir.path().join("spacing-law-v1-b2-s6.00-surmise.json");
        assert!(path.exists());
        std::fs::write(&path, b"not json").unwrap();
        let rebuilt = limit_law_cached(dir.path(), 2, 6.0, LawMode::Surmise).unwrap();
        assert_eq!(built.cdf, rebuilt.cdf);
        let bytes = std::fs::read(&path).unwrap();
        assert!(serde_json::from_slice::<LimitLaw>(&bytes).is_ok());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(limit_law(3, 6.0, LawMode::Exact).is_err());
        assert!(limit_law(2, 0.5, LawMode::Exact).is_err());
        assert!(wigner_surmise(0, 1.0).is_err());
        assert!(wigner_surmise(1, -1.0).is_err());
    }
}
