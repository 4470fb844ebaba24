//! Decay-rate experiment driver.
//!
//! An experiment sweeps matrix sizes, draws `trials` independent spectra
//! per size, forms the localized or unfolded spacing measure of each, and
//! records the mean Kolmogorov distance to a reference spacing law. A
//! log-log line fit over the sweep estimates the decay exponent, which
//! sits near 1/2 for the ensembles covered here.
//!
//! Trials run in parallel but results are reduced in trial order, so a
//! run is bit-for-bit reproducible for any worker count.

pub mod outputs;

use crate::eigensolver::spectrum_of;
use crate::limits::{limit_law, LawMode, LimitLaw, LimitsError};
use crate::rng::{derive_seed, trial_salt};
use crate::sampler::{sample, EnsembleSpec};
use crate::spacings::{kolmogorov_distance, spacing_measure, Window};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Limits(#[from] LimitsError),
    #[error("step {step} (n = {n}): {failures} of {trials} trials failed; first: {first}")]
    TooManyFailures { step: usize, n: usize, failures: usize, trials: usize, first: String },
    #[error("fit needs at least 3 points with positive distances")]
    BadFit,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(String),
}

/// Window request that still depends on the matrix size; the local window
/// defaults to the shrinking width |I| = n^{-1/2} when none is given.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum WindowSpec {
    LocalLinear { a: f64, half_width: Option<f64> },
    Unfolded { lo: f64, hi: f64 },
}

impl WindowSpec {
    pub fn resolve(&self, n: usize) -> Window {
        match *self {
            WindowSpec::LocalLinear { a, half_width: Some(h) } => Window::local(a, h),
            WindowSpec::LocalLinear { a, half_width: None } => Window::local_default(a, n),
            WindowSpec::Unfolded { lo, hi } => Window::unfolded(lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Ensemble template; its `n` and `seed` fields are overridden per
    /// sweep step and trial.
    pub ensemble: EnsembleSpec,
    pub window: WindowSpec,
    pub n_values: Vec<usize>,
    pub trials: usize,
    /// Reference law: symmetry class, construction mode, table extent.
    pub law_beta: u8,
    pub law_mode: LawMode,
    pub law_s_max: f64,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_values.is_empty() {
            return Err(HarnessError::BadConfig("n_values must be nonempty".into()));
        }
        if self.n_values.iter().any(|&n| n < 4) {
            return Err(HarnessError::BadConfig("matrix sizes below 4 are degenerate".into()));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::BadConfig("n_values must be strictly increasing".into()));
        }
        if self.trials < 2 {
            return Err(HarnessError::BadConfig("need at least 2 trials per size".into()));
        }
        if !matches!(self.law_beta, 1 | 2 | 4) {
            return Err(HarnessError::BadConfig(format!("no spacing law for beta {}", self.law_beta)));
        }
        if !(2.0..=12.0).contains(&self.law_s_max) {
            return Err(HarnessError::BadConfig(format!("law_s_max {} outside [2, 12]", self.law_s_max)));
        }
        let smallest = self.n_values[0];
        self.window
            .resolve(smallest)
            .validate()
            .map_err(|e| HarnessError::BadConfig(format!("window: {e}")))?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        format!("{:x}", hasher.finalize())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    /// Mean Kolmogorov distance over the surviving trials.
    pub mean_distance: f64,
    /// Standard error of that mean.
    pub std_error: f64,
    pub trials_used: usize,
    pub failures: usize,
}

/// Least-squares line through (ln n, -ln E): `minus_log_e = slope * ln_n +
/// intercept`, so E_n = exp(-intercept) n^{-slope}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub package_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub sweeps: Vec<SweepRecord>,
    pub fit: Option<FitLine>,
    pub provenance: Provenance,
}

fn kahan_mean(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for &x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum / xs.len() as f64
}

/// Run the sweep against a prebuilt reference law (must match the config).
pub fn run_experiment_with_law(
    config: &ExperimentConfig,
    law: &LimitLaw,
) -> Result<ExperimentResult, HarnessError> {
    config.validate()?;
    if law.beta != config.law_beta {
        return Err(HarnessError::BadConfig(format!(
            "law is for beta {}, config wants {}",
            law.beta, config.law_beta
        )));
    }
    let mut sweeps = Vec::with_capacity(config.n_values.len());
    for (step, &n) in config.n_values.iter().enumerate() {
        let window = config.window.resolve(n);
        let outcomes: Vec<Result<f64, String>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(config.master_seed, trial_salt(step, trial));
                let spec = config.ensemble.with_n(n).with_seed(seed);
                let spectrum = sample(&spec)
                    .map_err(|e| e.to_string())
                    .and_then(|m| spectrum_of(m).map_err(|e| e.to_string()))?;
                let measure = spacing_measure(&spectrum, &window).map_err(|e| e.to_string())?;
                kolmogorov_distance(&measure, law).map_err(|e| e.to_string())
            })
            .collect();
        let distances: Vec<f64> = outcomes.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
        let failures = config.trials - distances.len();
        // tolerate isolated degenerate draws, never a systematic failure
        if failures * 100 > config.trials {
            let first = outcomes
                .iter()
                .find_map(|r| r.as_ref().err().cloned())
                .unwrap_or_else(|| "unknown".into());
            return Err(HarnessError::TooManyFailures { step, n, failures, trials: config.trials, first });
        }
        let mean = kahan_mean(&distances);
        let var = distances.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
            / (distances.len() - 1) as f64;
        sweeps.push(SweepRecord {
            n,
            mean_distance: mean,
            std_error: (var / distances.len() as f64).sqrt(),
            trials_used: distances.len(),
            failures,
        });
    }
    let fit = if sweeps.len() >= 3 && sweeps.iter().all(|s| s.mean_distance > 0.0) {
        let pts: Vec<(f64, f64)> = sweeps.iter().map(|s| (s.n as f64, s.mean_distance)).collect();
        Some(fit_loglog(&pts)?)
    } else {
        None
    };
    Ok(ExperimentResult {
        config: config.clone(),
        sweeps,
        fit,
        provenance: Provenance {
            config_sha256: config.content_hash(),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

/// Build the reference law from the config, then run the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    config.validate()?;
    let law = limit_law(config.law_beta, config.law_s_max, config.law_mode)?;
    run_experiment_with_law(config, &law)
}

/// Least-squares fit of -ln E against ln n for decay points (n, E).
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitLine, HarnessError> {
    if points.len() < 3 || points.iter().any(|&(n, e)| !(n > 1.0) || !(e > 0.0) || !e.is_finite()) {
        return Err(HarnessError::BadFit);
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| -e.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx <= 0.0 {
        return Err(HarnessError::BadFit);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(FitLine { slope, intercept, residual_rms })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub n: usize,
    pub mean: f64,
    /// Sample variance (m - 1 denominator).
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub trials_used: usize,
    /// Set when the statistic was constant across trials, which leaves the
    /// standardized moments undefined (reported as zero).
    pub degenerate: bool,
}

pub(crate) fn moments_of(n: usize, xs: &[f64]) -> MomentRecord {
    let m = xs.len() as f64;
    let mean = kahan_mean(xs);
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / m;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m;
    let variance = m2 * m / (m - 1.0);
    let degenerate = !(m2 > 0.0);
    MomentRecord {
        n,
        mean,
        variance,
        skewness: if degenerate { 0.0 } else { m3 / m2.powf(1.5) },
        excess_kurtosis: if degenerate { 0.0 } else { m4 / (m2 * m2) - 3.0 },
        trials_used: xs.len(),
        degenerate,
    }
}

/// Distributional probe for the window statistic: for each size, the first
/// four moments over trials of the spacing-measure mass on [0, s]. Under
/// the expected fluctuation behaviour the statistic is asymptotically
/// Gaussian, so skewness and excess kurtosis should shrink with n.
pub fn clt_probe(config: &ExperimentConfig, s: f64) -> Result<Vec<MomentRecord>, HarnessError> {
    config.validate()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(HarnessError::BadConfig(format!("probe length {s} must be positive")));
    }
    let mut records = Vec::with_capacity(config.n_values.len());
    for (step, &n) in config.n_values.iter().enumerate() {
        let window = config.window.resolve(n);
        let outcomes: Vec<Result<f64, String>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(config.master_seed, trial_salt(step, trial));
                let spec = config.ensemble.with_n(n).with_seed(seed);
                let spectrum = sample(&spec)
                    .map_err(|e| e.to_string())
                    .and_then(|m| spectrum_of(m).map_err(|e| e.to_string()))?;
                let measure = spacing_measure(&spectrum, &window).map_err(|e| e.to_string())?;
                Ok(measure.mass_up_to(s))
            })
            .collect();
        let values: Vec<f64> = outcomes.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
        let failures = config.trials - values.len();
        if failures * 100 > config.trials {
            let first = outcomes
                .iter()
                .find_map(|r| r.as_ref().err().cloned())
                .unwrap_or_else(|| "unknown".into());
            return Err(HarnessError::TooManyFailures { step, n, failures, trials: config.trials, first });
        }
        records.push(moments_of(n, &values));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{EntryDist, Symmetry};
    use approx::assert_abs_diff_eq;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            ensemble: EnsembleSpec::tridiagonal(2.0, 8, 0),
            window: WindowSpec::Unfolded { lo: -0.5, hi: 0.5 },
            n_values: vec![24, 32],
            trials: 8,
            law_beta: 2,
            law_mode: LawMode::Surmise,
            law_s_max: 6.0,
            master_seed: 7,
        }
    }

    #[test]
    fn window_spec_resolution() {
        let w = WindowSpec::LocalLinear { a: 0.2, half_width: None }.resolve(400);
        match w {
            Window::LocalLinear { a, half_width, .. } => {
                assert_eq!(a, 0.2);
                assert_abs_diff_eq!(half_width, 0.5 / 20.0, epsilon = 1e-15);
            }
            _ => panic!("wrong window kind"),
        }
        let w = WindowSpec::LocalLinear { a: 0.2, half_width: Some(0.3) }.resolve(400);
        match w {
            Window::LocalLinear { half_width, .. } => assert_eq!(half_width, 0.3),
            _ => panic!("wrong window kind"),
        }
        assert_eq!(
            WindowSpec::Unfolded { lo: -0.1, hi: 0.1 }.resolve(17),
            Window::unfolded(-0.1, 0.1)
        );
    }

    #[test]
    fn config_validation_rejects_malformed_sweeps() {
        let ok = small_config();
        ok.validate().unwrap();
        let mut bad = ok.clone();
        bad.n_values = vec![];
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.n_values = vec![32, 24];
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.trials = 1;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.law_beta = 3;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.window = WindowSpec::Unfolded { lo: 0.5, hi: -0.5 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn results_are_identical_for_any_worker_count() {
        let config = small_config();
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_experiment(&config).unwrap())
        };
        let one = serde_json::to_string(&run_with(1)).unwrap();
        let two = serde_json::to_string(&run_with(2)).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn mean_distance_decays_with_size() {
        let mut config = small_config();
        config.n_values = vec![64, 256];
        config.trials = 30;
        let result = run_experiment(&config).unwrap();
        assert_eq!(result.sweeps.len(), 2);
        assert!(result.sweeps[1].mean_distance < result.sweeps[0].mean_distance);
        assert!(result.fit.is_none(), "two points cannot be fit");
    }

    #[test]
    fn systematic_trial_failure_aborts_with_context() {
        let mut config = small_config();
        // a window this narrow captures at most one eigenvalue
        config.window = WindowSpec::LocalLinear { a: 0.0, half_width: Some(1e-9) };
        match run_experiment(&config) {
            Err(HarnessError::TooManyFailures { failures, trials, .. }) => {
                assert_eq!(failures, trials);
            }
            other => panic!("expected TooManyFailures, got {other:?}"),
        }
    }

    #[test]
    fn loglog_fit_recovers_exact_line() {
        let (a, b) = (0.5, 0.3);
        let pts: Vec<(f64, f64)> = [100.0f64, 200.0, 400.0, 800.0]
            .iter()
            .map(|&n| (n, (-(a * n.ln() + b)).exp()))
            .collect();
        let fit = fit_loglog(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, a, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, b, epsilon = 1e-12);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn loglog_fit_rejects_degenerate_input() {
        assert!(fit_loglog(&[(100.0, 0.1), (200.0, 0.05)]).is_err());
        assert!(fit_loglog(&[(100.0, 0.1), (200.0, 0.0), (400.0, 0.01)]).is_err());
    }

    #[test]
    fn moment_pins_and_degenerate_flag() {
        let rec = moments_of(10, &[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(rec.mean, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rec.variance, 5.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rec.skewness, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rec.excess_kurtosis, -1.36, epsilon = 1e-14);
        assert!(!rec.degenerate);
        let flat = moments_of(10, &[2.0; 6]);
        assert!(flat.degenerate);
        assert_eq!(flat.variance, 0.0);
        assert_eq!(flat.skewness, 0.0);
    }

    #[test]
    fn clt_probe_reports_finite_moments() {
        let mut config = small_config();
        config.trials = 16;
        let records = clt_probe(&config, 1.0).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert!(r.mean.is_finite() && r.variance > 0.0 && !r.degenerate);
            assert_eq!(r.trials_used, 16);
        }
    }

    #[test]
    fn standard_error_shrinks_with_more_trials() {
        let mut few = small_config();
        few.n_values = vec![48];
        few.trials = 8;
        let mut many = few.clone();
        many.trials = 32;
        let e_few = run_experiment(&few).unwrap().sweeps[0].std_error;
        let e_many = run_experiment(&many).unwrap().sweeps[0].std_error;
        assert!(e_many < e_few, "{e_many} vs {e_few}");
    }

    #[test]
    fn provenance_hash_tracks_config_content() {
        let a = small_config();
        let mut b = a.clone();
        assert_eq!(a.content_hash(), b.content_hash());
        b.trials += 1;
        assert_ne!(a.content_hash(), b.content_hash());
        let result = run_experiment(&a).unwrap();
        assert_eq!(result.provenance.config_sha256, a.content_hash());
        assert_eq!(result.provenance.package_version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn ensembles_with_wigner_entries_run_end_to_end() {
        let mut config = small_config();
        config.ensemble = EnsembleSpec::wigner(EntryDist::Uniform, Symmetry::RealSymmetric, 8, 0);
        config.law_beta = 1;
        config.n_values = vec![32, 48];
        config.trials = 6;
        let result = run_experiment(&config).unwrap();
        assert!(result.sweeps.iter().all(|s| s.mean_distance > 0.0 && s.mean_distance < 1.0));
    }
}
