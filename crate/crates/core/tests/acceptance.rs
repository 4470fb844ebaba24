//! Acceptance gate: one test per shipping criterion, each printing a
//! single PASS/FAIL line (visible with --nocapture; cargo's own per-test
//! ok/FAILED line mirrors it). Tolerances are fixed here, not tuned at
//! run time.

use rand::seq::SliceRandom;
use rand::Rng;
use rmt_core::eigensolver::spectrum_of;
use rmt_core::harness::{run_experiment_with_law, ExperimentConfig, WindowSpec};
use rmt_core::kernels::{b_nk_gue, pfaffian, sine_kernel, w_k, GueKernel};
use rmt_core::limits::{
    gap_fredholm, gap_painleve, gap_series, limit_law, painleve_sigma, spacing_cdf_series,
    wigner_surmise_cdf, LawMode, LimitLaw,
};
use rmt_core::linalg::Mat;
use rmt_core::rng::{derive_seed, rng_from_seed, trial_salt};
use rmt_core::sampler::{sample, EnsembleSpec, EntryDist, Symmetry};
use rmt_core::spacings::{
    kolmogorov_distance, verify_combinatorial_identity, EmpiricalMeasure, SemicircleCdf, Window,
};
use std::sync::OnceLock;

fn report(criterion: usize, ok: bool, details: &str) {
    println!("criterion {criterion}: {} ({details})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {details}");
}

fn law(beta: u8) -> &'static LimitLaw {
    static LAWS: [OnceLock<LimitLaw>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match beta {
        1 => 0,
        2 => 1,
        4 => 2,
        _ => panic!("no law for beta {beta}"),
    };
    LAWS[slot].get_or_init(|| limit_law(beta, 6.0, LawMode::Exact).expect("law builds"))
}

const SWEEP_SIZES: [usize; 5] = [100, 200, 400, 800, 1600];
const SWEEP_TRIALS: usize = 200;
const SLOPE_BAND: (f64, f64) = (0.44, 0.56);
const INTERCEPT_BAND: (f64, f64) = (-1.2, 0.7);

fn decay_sweep(label: &str, ensemble: EnsembleSpec, window: WindowSpec, law_beta: u8, seed: u64) -> String {
    let config = ExperimentConfig {
        ensemble,
        window,
        n_values: SWEEP_SIZES.to_vec(),
        trials: SWEEP_TRIALS,
        law_beta,
        law_mode: LawMode::Exact,
        law_s_max: 6.0,
        master_seed: seed,
    };
    let result = run_experiment_with_law(&config, law(law_beta)).expect("sweep runs");
    let fit = result.fit.expect("five points fit");
    let ok = (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&fit.slope)
        && (INTERCEPT_BAND.0..=INTERCEPT_BAND.1).contains(&fit.intercept);
    let detail = format!("{label}: slope {:.4}, intercept {:.4}", fit.slope, fit.intercept);
    assert!(ok, "criterion 1 failed: {detail}");
    detail
}

#[test]
fn criterion_01_distance_decay_sweeps() {
    let a = decay_sweep(
        "unitary dense",
        EnsembleSpec::gaussian(2.0, 8, 0),
        WindowSpec::Unfolded { lo: -0.1, hi: 0.1 },
        2,
        101,
    );
    let b = decay_sweep(
        "symplectic tridiagonal",
        EnsembleSpec::tridiagonal(4.0, 8, 0),
        WindowSpec::Unfolded { lo: -0.5, hi: 0.5 },
        4,
        102,
    );
    let c = decay_sweep(
        "beta-entry real symmetric",
        EnsembleSpec::wigner(EntryDist::Beta { p: 2.0, q: 5.0 }, Symmetry::RealSymmetric, 8, 0),
        WindowSpec::Unfolded { lo: -0.5, hi: 0.5 },
        1,
        103,
    );
    report(1, true, &format!("{a}; {b}; {c}"));
}

#[test]
fn criterion_02_gap_routes_agree() {
    let table = painleve_sigma(16.0, 1e-10).unwrap();
    let mut worst_pain = 0.0f64;
    for &s in &[0.25, 0.5, 1.0, 2.0, 3.0] {
        let f = gap_fredholm(s, 40).unwrap();
        let (g, _, _) = gap_painleve(&table, s).unwrap();
        worst_pain = worst_pain.max((g - f).abs());
    }
    let mut worst_series = 0.0f64;
    for &s in &[0.25, 0.5, 1.0] {
        let f = gap_fredholm(s, 40).unwrap();
        let g = gap_series(2, s, 8).unwrap().value;
        worst_series = worst_series.max((g - f).abs());
    }
    report(
        2,
        worst_pain <= 1e-6 && worst_series <= 1e-4,
        &format!("max |painleve - determinant| {worst_pain:.2e} (tol 1e-6), max |series - determinant| {worst_series:.2e} (tol 1e-4)"),
    );
}

#[test]
fn criterion_03_short_gap_expansion() {
    let f = gap_fredholm(0.1, 40).unwrap();
    let series = gap_series(2, 0.1, 4).unwrap().value;
    let pi = std::f64::consts::PI;
    let poly = 1.0 - 0.1 + pi * pi * 0.1f64.powi(4) / 36.0;
    let d_series = (f - series).abs();
    let d_poly = (f - poly).abs();
    report(
        3,
        d_series <= 1e-8 && d_poly <= 2e-7,
        &format!("|det - series| {d_series:.2e} (tol 1e-8), |det - quartic| {d_poly:.2e} (tol 2e-7)"),
    );
}

#[test]
fn criterion_04_counting_identity_on_sampled_spectra() {
    let mut rng = rng_from_seed(404);
    let mut checked = 0usize;
    let mut attempts = 0usize;
    let mut worst = 0.0f64;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 160, "too many degenerate draws");
        let n = rng.random_range(50..=200);
        let seed = rng.random::<u64>();
        let spec = match attempts % 4 {
            0 => EnsembleSpec::tridiagonal([1.0, 2.0, 4.0, 7.0][(attempts / 4) % 4], n, seed),
            1 => EnsembleSpec::gaussian([1.0, 2.0][(attempts / 4) % 2], n.min(120), seed),
            2 => EnsembleSpec::wigner(EntryDist::Uniform, Symmetry::RealSymmetric, n, seed),
            _ => EnsembleSpec::wigner(EntryDist::Exponential, Symmetry::ComplexHermitian, n, seed),
        };
        let spectrum = spectrum_of(sample(&spec).unwrap()).unwrap();
        let window = if attempts % 2 == 0 {
            Window::unfolded(-0.4, 0.4)
        } else {
            Window::local_default(rng.random_range(-0.5..0.5), spectrum.len())
        };
        let s = [0.2, 0.5, 1.0, 2.0, 4.0][attempts % 5];
        match verify_combinatorial_identity(&spectrum, &window, s) {
            Ok(rep) => {
                worst = worst.max(rep.residual);
                assert!(rep.residual <= 1e-12, "residual {} on attempt {attempts}", rep.residual);
                assert!(rep.partial_sums_bracket, "bracketing failed on attempt {attempts}");
                checked += 1;
            }
            Err(_) => continue, // window caught fewer than two eigenvalues
        }
    }
    report(4, true, &format!("100 spectra, max residual {worst:.2e}, all partial sums bracket"));
}

#[test]
fn criterion_05_pfaffian_squares_to_determinant() {
    let mut rng = rng_from_seed(505);
    let mut worst_rel = 0.0f64;
    for i in 0..200 {
        let n = 2 * (1 + i % 6); // 2, 4, ..., 12
        let mut a = Mat::zeros(n);
        for r in 0..n {
            for c in r + 1..n {
                let v = rng.random_range(-1.0..1.0);
                a.set(r, c, v);
                a.set(c, r, -v);
            }
        }
        let pf = pfaffian(&a).unwrap();
        let det = a.det();
        let rel = (pf * pf - det).abs() / det.abs().max(1e-12);
        worst_rel = worst_rel.max(rel);
        assert!(rel <= 1e-8, "matrix {i} (n = {n}): pf^2 {} vs det {det}", pf * pf);
    }
    let mut worst_closed = 0.0f64;
    for _ in 0..20 {
        let mut a = Mat::zeros(4);
        for r in 0..4 {
            for c in r + 1..4 {
                let v = rng.random_range(-1.0..1.0);
                a.set(r, c, v);
                a.set(c, r, -v);
            }
        }
        let closed = a.get(0, 1) * a.get(2, 3) - a.get(0, 2) * a.get(1, 3) + a.get(0, 3) * a.get(1, 2);
        worst_closed = worst_closed.max((pfaffian(&a).unwrap() - closed).abs());
    }
    report(
        5,
        worst_rel <= 1e-8 && worst_closed <= 1e-14,
        &format!("200 skew matrices, max rel |pf^2 - det| {worst_rel:.2e}; 4x4 closed form off by {worst_closed:.2e}"),
    );
}

#[test]
fn criterion_06_correlation_normalization_and_invariance() {
    let mut rng = rng_from_seed(606);
    // single-point correlation is exactly one
    for &beta in &[1u8, 2, 4] {
        for &t in &[-3.0, 0.0, 0.4, 7.7] {
            let w1 = w_k(beta, &[t]).unwrap().value;
            assert!(w1 == 1.0, "W_1({t}) = {w1} for beta {beta}");
        }
    }
    // permutation and translation invariance
    let mut worst_inv = 0.0f64;
    for &beta in &[1u8, 2, 4] {
        for k in 2..=6usize {
            let pts: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..5.0)).collect();
            let base = w_k(beta, &pts).unwrap().value;
            let mut shuffled = pts.clone();
            shuffled.shuffle(&mut rng);
            let shift: Vec<f64> = pts.iter().map(|p| p + 13.25).collect();
            let d_perm = (w_k(beta, &shuffled).unwrap().value - base).abs();
            let d_shift = (w_k(beta, &shift).unwrap().value - base).abs();
            worst_inv = worst_inv.max(d_perm).max(d_shift);
        }
    }
    // finite-size correlation determinants respect the 2^k bound inside the
    // shrinking window
    let n = 256;
    let half = (n as f64).sqrt() * rmt_core::kernels::bulk_density(0.0); // window image half-length
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..30 {
        let k = 1 + i % 4;
        let pts: Vec<f64> = (0..k).map(|_| rng.random_range(-half..half)).collect();
        let b = b_nk_gue(n, 0.0, &pts).unwrap().value;
        worst_excess = worst_excess.max(b.abs() - 2f64.powi(k as i32));
    }
    report(
        6,
        worst_inv <= 1e-10 && worst_excess <= 1e-9,
        &format!("invariance deviation {worst_inv:.2e} (tol 1e-10), bound excess {worst_excess:.2e}"),
    );
}

#[test]
fn criterion_07_kernel_convergence_rate() {
    let grid: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
    let sup_err = |n: usize| -> f64 {
        let k = GueKernel::new(n).unwrap();
        let mut worst = 0.0f64;
        for &u in &grid {
            for &v in &grid {
                worst = worst.max((k.eval_rescaled(0.0, u, v).unwrap() - sine_kernel(u, v)).abs());
            }
        }
        worst
    };
    let errs: Vec<f64> = [50usize, 100, 200, 400].iter().map(|&n| sup_err(n)).collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    // the sup error carries a second-order component with a large constant,
    // so the doubling ratio sits above 2 at the smallest sizes and falls
    // toward 2 as the first-order term takes over; every ratio must show a
    // genuine halving without outrunning second order, and the last one
    // pins the asymptotic first-order rate
    let ok = ratios.iter().all(|r| (1.7..=2.9).contains(r))
        && (1.9..=2.5).contains(ratios.last().expect("three ratios"));
    report(
        7,
        ok,
        &format!(
            "sup errors {:?}, doubling ratios {:?} (band [1.7, 2.9], last in [1.9, 2.5])",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_08_laws_are_distributions_with_unit_mean() {
    let mut details = Vec::new();
    for &beta in &[1u8, 2, 4] {
        let law = law(beta);
        assert_eq!(law.cdf_at(0.0), 0.0, "beta {beta} law starts above zero");
        assert!(
            law.cdf.windows(2).all(|w| w[1] >= w[0]),
            "beta {beta} law is not monotone"
        );
        let mass = law.cdf_at(6.0);
        assert!(mass >= 0.999, "beta {beta} law mass {mass}");
        let mean = law.mean();
        assert!((mean - 1.0).abs() <= 1e-2, "beta {beta} law mean {mean}");
        details.push(format!("beta {beta}: mass {mass:.5}, mean {mean:.4}"));
    }
    // the unitary law agrees with the independent correlation series
    let mut worst = 0.0f64;
    for &s in &[0.5, 1.0, 1.5, 2.0] {
        let series = spacing_cdf_series(2, s, 8).unwrap().value;
        worst = worst.max((law(2).cdf_at(s) - series).abs());
    }
    assert!(worst <= 1e-4, "unitary law vs series: {worst}");
    report(8, true, &format!("{}; series cross-check {worst:.2e}", details.join("; ")));
}

#[test]
fn criterion_09_surmise_tracks_exact_laws() {
    let mut worst = 0.0f64;
    for &beta in &[1u8, 2, 4] {
        for i in 0..=120 {
            let s = 0.05 * i as f64;
            let d = (law(beta).cdf_at(s) - wigner_surmise_cdf(beta, s).unwrap()).abs();
            worst = worst.max(d);
        }
    }
    report(9, worst <= 0.01, &format!("sup |exact - surmise| {worst:.4} (tol 0.01)"));
}

#[test]
fn criterion_10_global_spectra_follow_the_semicircle() {
    let trials = 50;
    let n = 2000;
    let ensembles = [
        ("unitary dense", EnsembleSpec::gaussian(2.0, n, 0)),
        ("orthogonal dense", EnsembleSpec::gaussian(1.0, n, 0)),
        ("tridiagonal beta 7", EnsembleSpec::tridiagonal(7.0, n, 0)),
        ("uniform-entry real", EnsembleSpec::wigner(EntryDist::Uniform, Symmetry::RealSymmetric, n, 0)),
    ];
    let mut details = Vec::new();
    for (step, (label, spec)) in ensembles.iter().enumerate() {
        let mut pooled = Vec::with_capacity(trials * n);
        for trial in 0..trials {
            let seed = derive_seed(1010, trial_salt(step, trial));
            let spectrum = spectrum_of(sample(&spec.with_seed(seed)).unwrap()).unwrap();
            pooled.extend_from_slice(&spectrum.values);
        }
        let weight = 1.0 / pooled.len() as f64;
        let measure = EmpiricalMeasure::from_positions(pooled, weight);
        let ks = kolmogorov_distance(&measure, &SemicircleCdf).unwrap();
        assert!(ks <= 0.02, "{label}: pooled distance {ks}");
        details.push(format!("{label} {ks:.4}"));
    }
    report(10, true, &format!("pooled distances: {}", details.join(", ")));
}

#[test]
fn criterion_11_runs_reproduce_bit_for_bit_across_worker_counts() {
    let config = ExperimentConfig {
        ensemble: EnsembleSpec::tridiagonal(2.0, 8, 0),
        window: WindowSpec::Unfolded { lo: -0.5, hi: 0.5 },
        n_values: vec![32, 48, 64],
        trials: 16,
        law_beta: 2,
        law_mode: LawMode::Surmise,
        law_s_max: 6.0,
        master_seed: 1111,
    };
    let reference = limit_law(2, 6.0, LawMode::Surmise).unwrap();
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let result = pool.install(|| run_experiment_with_law(&config, &reference).unwrap());
        serde_json::to_string(&result).unwrap()
    };
    let one = run_with(1);
    let two = run_with(2);
    report(
        11,
        one == two,
        &format!("serialized results identical across 1 and 2 workers ({} bytes)", one.len()),
    );
}
