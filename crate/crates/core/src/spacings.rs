//! Localized and unfolded spacing statistics.
//!
//! A [`Window`] selects a stretch of the spectrum, either a short interval
//! around a bulk point `a` (local-linear mode, eigenvalues rescaled by
//! `n * psi(a)` so unit spacing becomes order one) or an order-one interval
//! together with the semicircle unfolding `lambda -> n F(lambda)`.
//! [`spacing_measure`] turns the in-window nearest-neighbour gaps into a
//! purely atomic [`EmpiricalMeasure`]; [`gamma_measure`] does the same for
//! the k-th-neighbour family whose alternating sum reconstructs the spacing
//! measure exactly ([`verify_combinatorial_identity`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigensolver::Spectrum;

/// Semicircle density on `[-1, 1]`: `(2/pi) sqrt(1 - x^2)`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (2.0 / std::f64::consts::PI) * (1.0 - x * x).sqrt()
    }
}

/// Signed semicircle integral `F(t) = (t sqrt(1-t^2) + asin t) / pi`,
/// clamped outside `[-1, 1]`; `F(-1) = -1/2`, `F(0) = 0`, `F(1) = 1/2`.
pub fn semicircle_cdf_signed(t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
}

/// Anything that can be evaluated as a cumulative distribution function.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

/// Adapter turning a closure into a [`Cdf`].
pub struct CdfFn<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> Cdf for CdfFn<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Semicircle distribution function `F(t) + 1/2` on `[-1, 1]`.
pub struct SemicircleCdf;

impl Cdf for SemicircleCdf {
    fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf_signed(x) + 0.5
    }
}

/// Spectral window. Serializes with a `mode` tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Window {
    /// Interval `[a - half_width, a + half_width]` with local rescaling
    /// `(lambda - a) * n * psi_a`.
    LocalLinear { a: f64, half_width: f64, psi_a: f64 },
    /// Interval `[lo, hi]` in the original coordinates, with eigenvalues
    /// unfolded through the semicircle integral.
    Unfolded { lo: f64, hi: f64 },
}

impl Window {
    /// Local window at bulk point `a` with the semicircle density filled in.
    pub fn local(a: f64, half_width: f64) -> Self {
        Window::LocalLinear { a, half_width, psi_a: semicircle_density(a) }
    }

    /// Local window with the default width `|I| = n^{-1/2}`.
    pub fn local_default(a: f64, n: usize) -> Self {
        Window::local(a, 0.5 / (n as f64).sqrt())
    }

    pub fn unfolded(lo: f64, hi: f64) -> Self {
        Window::Unfolded { lo, hi }
    }

    pub fn validate(&self) -> Result<(), SpacingError> {
        match *self {
            Window::LocalLinear { a, half_width, psi_a } => {
                if !(psi_a > 0.0) {
                    return Err(SpacingError::BadWindow("psi_a must be positive"));
                }
                if !(half_width > 0.0) {
                    return Err(SpacingError::BadWindow("half_width must be positive"));
                }
                if a - half_width <= -1.0 || a + half_width >= 1.0 {
                    return Err(SpacingError::BadWindow(
                        "local window must lie inside the bulk (-1, 1)",
                    ));
                }
                Ok(())
            }
            Window::Unfolded { lo, hi } => {
                if !(lo < hi) {
                    return Err(SpacingError::BadWindow("window interval is empty"));
                }
                if lo < -1.0 || hi > 1.0 {
                    return Err(SpacingError::BadWindow("window must lie within [-1, 1]"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SpacingError {
    #[error("invalid window: {0}")]
    BadWindow(&'static str),
    #[error("window holds {found} eigenvalue(s); at least 2 are required")]
    WindowTooSparse { found: usize },
    #[error("neighbour order k must be at least 2, got {0}")]
    BadOrder(usize),
    #[error("empirical measure has no atoms")]
    EmptyMeasure,
}

/// Weight convention for spacing measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `1 / |A|` with `|A| = n psi(a) |I|`: mass equals in-window pair count
    /// over the expected count (local-mode default).
    WindowMass,
    /// `1 / (count - 1)`: mass of the nearest-neighbour measure is exactly
    /// one (unfolded-mode default).
    CountMinusOne,
}

/// One atom of an empirical measure: a position with a (possibly large)
/// integer multiplicity kept in floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub multiplicity: f64,
}

/// Purely atomic measure with a uniform weight per unit multiplicity.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    atoms: Vec<Atom>,
    weight_per_atom: f64,
}

impl EmpiricalMeasure {
    pub fn from_positions(positions: Vec<f64>, weight_per_atom: f64) -> Self {
        Self::from_atoms(
            positions.into_iter().map(|p| Atom { position: p, multiplicity: 1.0 }).collect(),
            weight_per_atom,
        )
    }

    pub fn from_atoms(mut atoms: Vec<Atom>, weight_per_atom: f64) -> Self {
        assert!(weight_per_atom > 0.0, "atom weight must be positive");
        atoms.sort_by(|x, y| x.position.partial_cmp(&y.position).expect("finite atoms"));
        EmpiricalMeasure { atoms, weight_per_atom }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn weight_per_atom(&self) -> f64 {
        self.weight_per_atom
    }

    pub fn total_mass(&self) -> f64 {
        self.weight_per_atom * self.atoms.iter().map(|a| a.multiplicity).sum::<f64>()
    }

    /// Measure of `(-inf, x]` (right-continuous empirical distribution).
    pub fn mass_up_to(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for a in &self.atoms {
            if a.position > x {
                break;
            }
            acc += a.multiplicity;
        }
        acc * self.weight_per_atom
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Rescaled coordinates of the in-window eigenvalues.
///
/// Local-linear mode maps `lambda` to `(lambda - a) * n * psi_a`; unfolded
/// mode maps to `n * F(lambda)` with the semicircle integral `F`. Membership
/// is decided in the original coordinates.
pub fn rescale_local(spectrum: &Spectrum, window: &Window) -> Result<Vec<f64>, SpacingError> {
    window.validate()?;
    let n = spectrum.len() as f64;
    let vals = &spectrum.values;
    let out = match *window {
        Window::LocalLinear { a, half_width, psi_a } => {
            let scale = n * psi_a;
            vals.iter()
                .filter(|&&v| (v - a).abs() <= half_width)
                .map(|&v| (v - a) * scale)
                .collect()
        }
        Window::Unfolded { lo, hi } => vals
            .iter()
            .filter(|&&v| v >= lo && v <= hi)
            .map(|&v| n * semicircle_cdf_signed(v))
            .collect(),
    };
    Ok(out)
}

/// Unfolded coordinates `n F(lambda)` of the whole spectrum.
pub fn unfold(spectrum: &Spectrum) -> Vec<f64> {
    let n = spectrum.len() as f64;
    spectrum.values.iter().map(|&v| n * semicircle_cdf_signed(v)).collect()
}

fn default_normalization(window: &Window) -> Normalization {
    match window {
        Window::LocalLinear { .. } => Normalization::WindowMass,
        Window::Unfolded { .. } => Normalization::CountMinusOne,
    }
}

fn weight_for(window: &Window, n: usize, count: usize, norm: Normalization) -> f64 {
    match norm {
        Normalization::CountMinusOne => 1.0 / (count as f64 - 1.0),
        Normalization::WindowMass => match *window {
            Window::LocalLinear { half_width, psi_a, .. } => {
                1.0 / (n as f64 * psi_a * 2.0 * half_width)
            }
            Window::Unfolded { lo, hi } => {
                // expected in-window count under the semicircle law
                1.0 / (n as f64 * (semicircle_cdf_signed(hi) - semicircle_cdf_signed(lo)))
            }
        },
    }
}

/// Nearest-neighbour spacing measure of the in-window eigenvalues, with the
/// mode's default weight convention.
pub fn spacing_measure(
    spectrum: &Spectrum,
    window: &Window,
) -> Result<EmpiricalMeasure, SpacingError> {
    spacing_measure_with(spectrum, window, default_normalization(window))
}

/// Spacing measure with an explicit weight convention.
pub fn spacing_measure_with(
    spectrum: &Spectrum,
    window: &Window,
    norm: Normalization,
) -> Result<EmpiricalMeasure, SpacingError> {
    let rescaled = rescale_local(spectrum, window)?;
    if rescaled.len() < 2 {
        return Err(SpacingError::WindowTooSparse { found: rescaled.len() });
    }
    let weight = weight_for(window, spectrum.len(), rescaled.len(), norm);
    let atoms: Vec<f64> = rescaled.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(EmpiricalMeasure::from_positions(atoms, weight))
}

/// Exact binomial coefficient in floating point (exact while below 2^53).
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    acc.round()
}

/// k-th neighbour family: one atom per in-window index pair `(i, j)` at the
/// rescaled gap, with multiplicity `C(j - i - 1, k - 2)` (the number of ways
/// to choose the k - 2 interior indices). `k = 2` counts every pair.
pub fn gamma_measure(
    spectrum: &Spectrum,
    window: &Window,
    k: usize,
) -> Result<EmpiricalMeasure, SpacingError> {
    if k < 2 {
        return Err(SpacingError::BadOrder(k));
    }
    let rescaled = rescale_local(spectrum, window)?;
    if rescaled.len() < 2 {
        return Err(SpacingError::WindowTooSparse { found: rescaled.len() });
    }
    let weight = weight_for(window, spectrum.len(), rescaled.len(), default_normalization(window));
    let mut atoms = Vec::new();
    for i in 0..rescaled.len() {
        for j in i + 1..rescaled.len() {
            let mult = binomial(j - i - 1, k - 2);
            if mult > 0.0 {
                atoms.push(Atom { position: rescaled[j] - rescaled[i], multiplicity: mult });
            }
        }
    }
    if atoms.is_empty() {
        return Err(SpacingError::WindowTooSparse { found: rescaled.len() });
    }
    Ok(EmpiricalMeasure::from_atoms(atoms, weight))
}

/// Outcome of the alternating-sum reconstruction check.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    /// Number of in-window eigenvalues (the sum is exact at this order).
    pub in_window: usize,
    /// `| sigma(0, s] - sum_k (-1)^k gamma_k(0, s] |` in measure units.
    pub residual: f64,
    /// Whether every odd partial sum was a lower and every even partial sum
    /// an upper bound for the spacing count.
    pub partial_sums_bracket: bool,
    pub s: f64,
}

/// Verifies that the alternating sum of the k-th neighbour counts
/// reconstructs the nearest-neighbour count on `(-inf, s]`, and that the
/// partial sums bracket it from both sides.
pub fn verify_combinatorial_identity(
    spectrum: &Spectrum,
    window: &Window,
    s: f64,
) -> Result<IdentityReport, SpacingError> {
    let rescaled = rescale_local(spectrum, window)?;
    let count = rescaled.len();
    if count < 2 {
        return Err(SpacingError::WindowTooSparse { found: count });
    }
    let weight = weight_for(window, spectrum.len(), count, default_normalization(window));
    let sigma_count = rescaled.windows(2).filter(|w| w[1] - w[0] <= s).count() as f64;
    // per-order endpoint-pair counts (exact integers in f64)
    let mut per_k = vec![0.0f64; count + 1]; // index k, valid 2..=count
    for i in 0..count {
        for j in i + 1..count {
            if rescaled[j] - rescaled[i] <= s {
                let gap = j - i - 1;
                for k in 2..=count {
                    let m = binomial(gap, k - 2);
                    if m == 0.0 && k - 2 > gap {
                        break;
                    }
                    per_k[k] += m;
                }
            }
        }
    }
    let mut partial = 0.0f64;
    let mut bracket = true;
    let slack = 1e-9 * (1.0 + sigma_count.abs());
    for k in 2..=count {
        partial += if k % 2 == 0 { per_k[k] } else { -per_k[k] };
        let ok = if k % 2 == 0 {
            partial >= sigma_count - slack
        } else {
            partial <= sigma_count + slack
        };
        bracket &= ok;
    }
    Ok(IdentityReport {
        in_window: count,
        residual: (partial - sigma_count).abs() * weight,
        partial_sums_bracket: bracket,
        s,
    })
}

/// Exact Kolmogorov distance between an empirical measure and a continuous
/// distribution function: the supremum is attained at an atom (left or right
/// limit) or in the far tail where the empirical mass stops changing.
pub fn kolmogorov_distance(
    measure: &EmpiricalMeasure,
    law: &impl Cdf,
) -> Result<f64, SpacingError> {
    if measure.is_empty() {
        return Err(SpacingError::EmptyMeasure);
    }
    let w = measure.weight_per_atom();
    let mut cum = 0.0;
    let mut best = 0.0f64;
    let atoms = measure.atoms();
    let mut i = 0;
    while i < atoms.len() {
        // merge ties so the jump at a repeated position is counted once
        let pos = atoms[i].position;
        let mut mult = 0.0;
        while i < atoms.len() && atoms[i].position == pos {
            mult += atoms[i].multiplicity;
            i += 1;
        }
        let f = law.cdf(pos);
        best = best.max((cum * w - f).abs());
        cum += mult;
        best = best.max((cum * w - f).abs());
    }
    // tail: the law keeps growing to 1 while the empirical mass is constant
    best = best.max((measure.total_mass() - 1.0).abs());
    Ok(best)
}

/// Writes a measure as CSV with header `atom,weight`; multiplicities fold
/// into the per-row weight.
pub fn write_measure_csv(
    measure: &EmpiricalMeasure,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(out, "atom,weight")?;
    for a in measure.atoms() {
        writeln!(out, "{},{}", a.position, a.multiplicity * measure.weight_per_atom())?;
    }
    Ok(())
}
