//! File outputs for an experiment: decay table, full summary, and a
//! self-contained log-log plot.

use super::{ExperimentResult, HarnessError};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
}

/// Write `decay.csv`, `summary.json` and `decay.svg` into `dir`.
pub fn emit_outputs(result: &ExperimentResult, dir: &Path) -> Result<OutputPaths, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let paths = OutputPaths {
        csv: dir.join("decay.csv"),
        json: dir.join("summary.json"),
        svg: dir.join("decay.svg"),
    };
    std::fs::write(&paths.csv, decay_csv(result))?;
    let json = serde_json::to_string_pretty(result).map_err(|e| HarnessError::Serde(e.to_string()))?;
    std::fs::write(&paths.json, json)?;
    std::fs::write(&paths.svg, decay_svg(result))?;
    Ok(paths)
}

fn decay_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("n,E_N,stderr\n");
    for s in &result.sweeps {
        writeln!(out, "{},{},{}", s.n, s.mean_distance, s.std_error).expect("string write");
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 600.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 420.0;

/// Log-log scatter of the decay points with the fitted line. The plot is
/// plain SVG with one axes path, one circle per sweep point, and at most
/// one line element for the fit.
fn decay_svg(result: &ExperimentResult) -> String {
    let pts: Vec<(f64, f64)> = result
        .sweeps
        .iter()
        .filter(|s| s.mean_distance > 0.0)
        .map(|s| ((s.n as f64).ln(), -s.mean_distance.ln()))
        .collect();
    let (x_lo, x_hi) = padded_range(pts.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(pts.iter().map(|p| p.1));
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(
        svg,
        "<path d=\"M {LEFT} {BOTTOM} L {RIGHT} {BOTTOM} M {LEFT} {BOTTOM} L {LEFT} {TOP}\" \
         stroke=\"#333\" stroke-width=\"1.5\" fill=\"none\"/>"
    );
    for i in 0..=3 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 3.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 3.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{:.2}</text>",
            sx(fx),
            BOTTOM + 18.0,
            fx
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{:.2}</text>",
            LEFT - 8.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">ln n</text>",
        (LEFT + RIGHT) / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">-ln E</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
    if let Some(fit) = &result.fit {
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d73a49\" stroke-width=\"1.5\"/>",
            sx(x_lo),
            sy(fit.slope * x_lo + fit.intercept),
            sx(x_hi),
            sy(fit.slope * x_hi + fit.intercept)
        );
    }
    for (x, y) in &pts {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1f6feb\"/>",
            sx(*x),
            sy(*y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1.0);
    (lo - pad, hi + pad)
}
