//! End-to-end checks of the `rmt` binary: every subcommand runs against a
//! temp directory and produces the promised file formats.

use std::path::Path;
use std::process::Command;

fn rmt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rmt"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn lines_of(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn limit_law_surmise_writes_full_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("law.csv");
    run_ok(rmt().args(["limit-law", "--beta", "2", "--smax", "6", "--mode", "surmise"]).arg("--out").arg(&out));
    let lines = lines_of(&out);
    assert_eq!(lines[0], "s,cdf,density,err");
    assert_eq!(lines.len(), 302, "header plus 301 grid rows");
    let last: Vec<f64> = lines[301].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(last[0], 6.0);
    assert!(last[1] > 0.999 && last[1] <= 1.0);
}

#[test]
fn limit_law_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("law.csv");
    let cache = dir.path().join("cache");
    run_ok(
        rmt()
            .args(["limit-law", "--beta", "1", "--smax", "6", "--mode", "surmise"])
            .arg("--out")
            .arg(&out)
            .arg("--cache")
            .arg(&cache),
    );
    let cached = cache.join("spacing-law-v1-b1-s6.00-surmise.json");
    assert!(cached.exists());
    let stamp = std::fs::metadata(&cached).unwrap().modified().unwrap();
    run_ok(
        rmt()
            .args(["limit-law", "--beta", "1", "--smax", "6", "--mode", "surmise"])
            .arg("--out")
            .arg(&out)
            .arg("--cache")
            .arg(&cache),
    );
    assert_eq!(std::fs::metadata(&cached).unwrap().modified().unwrap(), stamp, "cache was rebuilt");
}

#[test]
fn sample_emits_spectra_and_pooled_spacings() {
    let dir = tempfile::tempdir().unwrap();
    let spectra = dir.path().join("spectra.csv");
    let spacings = dir.path().join("spacings.csv");
    run_ok(
        rmt()
            .args([
                "sample", "--ensemble", "tridiagonal", "--beta", "2", "--n", "64", "--trials", "2",
                "--seed", "5", "--window", "unfolded", "--lo", "-0.5", "--hi", "0.5",
            ])
            .arg("--out")
            .arg(&spectra)
            .arg("--emit-spacings")
            .arg(&spacings),
    );
    let lines = lines_of(&spectra);
    assert_eq!(lines[0], "trial,index,lambda");
    assert_eq!(lines.len(), 1 + 2 * 64);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0");
    let lambda: f64 = first[2].parse().unwrap();
    assert!(lambda.abs() < 1.3, "scaled eigenvalue {lambda} far outside [-1, 1]");

    let sp = lines_of(&spacings);
    assert_eq!(sp[0], "atom,weight");
    assert!(sp.len() > 10);
    let weights: Vec<f64> = sp[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(weights.iter().all(|&w| w > 0.0));
    let atoms: Vec<f64> = sp[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(atoms.windows(2).all(|w| w[0] <= w[1]), "pooled atoms not sorted");
}

#[test]
fn sample_rejects_contradictory_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_rmt"))
        .args(["sample", "--ensemble", "wigner", "--beta", "2", "--n", "16", "--out", "/dev/null"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn experiment_pipeline_and_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "ensemble": {
            "family": "beta-tridiagonal",
            "beta": 2.0,
            "n": 8,
            "seed": 0
        },
        "window": { "mode": "unfolded", "lo": -0.5, "hi": 0.5 },
        "n_values": [24, 36, 54, 81],
        "trials": 8,
        "law_beta": 2,
        "law_mode": "surmise",
        "law_s_max": 6.0,
        "master_seed": 11
    });
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();

    let out_a = dir.path().join("a");
    let stdout = run_ok(rmt().arg("experiment").arg("--config").arg(&cfg_path).arg("--out-dir").arg(&out_a));
    assert!(stdout.contains("fit:"), "stdout: {stdout}");
    for name in ["decay.csv", "summary.json", "decay.svg"] {
        assert!(out_a.join(name).exists(), "{name} missing");
    }
    let decay = lines_of(&out_a.join("decay.csv"));
    assert_eq!(decay[0], "n,E_N,stderr");
    assert_eq!(decay.len(), 5);

    // a second run with a different worker count reproduces the summary bit
    // for bit
    let out_b = dir.path().join("b");
    run_ok(
        rmt()
            .arg("experiment")
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out-dir")
            .arg(&out_b)
            .env("RMT_THREADS", "2"),
    );
    assert_eq!(
        std::fs::read(out_a.join("summary.json")).unwrap(),
        std::fs::read(out_b.join("summary.json")).unwrap()
    );

    let fit_json = dir.path().join("fit.json");
    let stdout = run_ok(
        rmt().arg("fit").arg("--input").arg(out_a.join("decay.csv")).arg("--json").arg(&fit_json),
    );
    assert!(stdout.contains("fit over 4 points"), "stdout: {stdout}");
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fit_json).unwrap()).unwrap();
    assert!(fit["slope"].is_number());
}

#[test]
fn kernel_eval_prints_values() {
    let stdout = run_ok(rmt().args(["kernel", "eval", "--beta", "2", "--x", "0.25", "--y", "0.25"]));
    let value: f64 = stdout.trim().strip_prefix("k = ").unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-12, "diagonal sine kernel is 1, got {value}");

    let stdout = run_ok(rmt().args(["kernel", "eval", "--beta", "1", "--x", "0.7", "--y", "0.2"]));
    assert!(stdout.contains("s  = ") && stdout.contains("i  = "), "stdout: {stdout}");

    let stdout = run_ok(rmt().args([
        "kernel", "eval", "--beta", "2", "--x", "0.0", "--y", "0.0", "--finite-n", "40",
    ]));
    let value: f64 = stdout.trim().strip_prefix("k_n = ").unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 0.05, "rescaled diagonal near 1, got {value}");

    let out = Command::new(env!("CARGO_BIN_EXE_rmt"))
        .args(["kernel", "eval", "--beta", "3", "--x", "0.0", "--y", "0.0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
