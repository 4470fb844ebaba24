//! Command-line driver: sample spectra, build spacing laws, run decay
//! experiments, and poke kernels from the shell.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rmt_core::eigensolver::spectrum_of;
use rmt_core::harness::outputs::emit_outputs;
use rmt_core::harness::{fit_loglog, run_experiment_with_law, ExperimentConfig};
use rmt_core::kernels::{finite_n_gue_kernel, matrix_kernel, sine_kernel};
use rmt_core::limits::{limit_law, limit_law_cached, LawMode, LimitLaw};
use rmt_core::rng::{derive_seed, trial_salt};
use rmt_core::sampler::{sample, EnsembleSpec, EntryDist, Symmetry};
use rmt_core::spacings::{spacing_measure, Window};
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "rmt", version, about = "Random-matrix spacing statistics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a decay experiment from a JSON config and write its outputs.
    Experiment {
        /// Path to an ExperimentConfig JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Directory for decay.csv, summary.json, decay.svg.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Directory holding cached law tables.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Tabulate a universal spacing law as CSV.
    LimitLaw {
        #[arg(long)]
        beta: u8,
        #[arg(long, default_value_t = 6.0)]
        smax: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
        /// Directory holding cached law tables.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Draw spectra and optionally their spacing measure.
    Sample {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        /// Symmetry parameter for gaussian (1, 2, 4) and tridiagonal (> 0).
        #[arg(long)]
        beta: Option<f64>,
        /// Entry distribution for wigner matrices.
        #[arg(long, value_enum)]
        dist: Option<DistArg>,
        /// Symmetry class for wigner matrices.
        #[arg(long, value_enum)]
        symmetry: Option<SymArg>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spectra CSV (trial,index,lambda).
        #[arg(long)]
        out: PathBuf,
        /// Also write the pooled spacing measure CSV (atom,weight).
        #[arg(long)]
        emit_spacings: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = WindowArg::Unfolded)]
        window: WindowArg,
        /// Centre of the local window.
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Half-width of the local window; defaults to n^(-1/2) / 2.
        #[arg(long)]
        half_width: Option<f64>,
        /// Lower edge of the unfolded window.
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        lo: f64,
        /// Upper edge of the unfolded window.
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        hi: f64,
    },
    /// Fit a decay line to an n,E_N[,stderr] CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Also write the fit as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Kernel evaluations.
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Evaluate the limiting kernel (or the finite-size one) at a point.
    Eval {
        #[arg(long)]
        beta: u8,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Evaluate the size-n kernel instead of the limit (beta 2 only).
        #[arg(long)]
        finite_n: Option<usize>,
        /// Bulk reference point for the finite-size rescaling.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        bulk_a: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Surmise,
}

impl From<ModeArg> for LawMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => LawMode::Exact,
            ModeArg::Surmise => LawMode::Surmise,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Tridiagonal,
    Wigner,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Normal,
    Uniform,
    Exponential,
    Beta25,
}

impl From<DistArg> for EntryDist {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Normal => EntryDist::Normal,
            DistArg::Uniform => EntryDist::Uniform,
            DistArg::Exponential => EntryDist::Exponential,
            DistArg::Beta25 => EntryDist::Beta { p: 2.0, q: 5.0 },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SymArg {
    Real,
    Complex,
    Quaternion,
}

impl From<SymArg> for Symmetry {
    fn from(s: SymArg) -> Self {
        match s {
            SymArg::Real => Symmetry::RealSymmetric,
            SymArg::Complex => Symmetry::ComplexHermitian,
            SymArg::Quaternion => Symmetry::QuaternionSelfDual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Local,
    Unfolded,
}

fn main() -> Result<()> {
    if let Ok(threads) = std::env::var("RMT_THREADS") {
        let threads: usize = threads.parse().context("RMT_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("rayon pool already initialized")?;
    }
    match Cli::parse().cmd {
        Cmd::Experiment { config, out_dir, cache } => cmd_experiment(&config, &out_dir, cache.as_deref()),
        Cmd::LimitLaw { beta, smax, mode, out, cache } => cmd_limit_law(beta, smax, mode.into(), &out, cache.as_deref()),
        Cmd::Sample {
            ensemble,
            beta,
            dist,
            symmetry,
            n,
            trials,
            seed,
            out,
            emit_spacings,
            window,
            a,
            half_width,
            lo,
            hi,
        } => {
            let spec = build_spec(ensemble, beta, dist, symmetry, n)?;
            let win = match window {
                WindowArg::Local => match half_width {
                    Some(h) => Window::local(a, h),
                    None => Window::local_default(a, n),
                },
                WindowArg::Unfolded => Window::unfolded(lo, hi),
            };
            cmd_sample(&spec, trials, seed, &out, emit_spacings.as_deref(), &win)
        }
        Cmd::Fit { input, json } => cmd_fit(&input, json.as_deref()),
        Cmd::Kernel { cmd: KernelCmd::Eval { beta, x, y, finite_n, bulk_a } } => {
            cmd_kernel_eval(beta, x, y, finite_n, bulk_a)
        }
    }
}

fn build_law(beta: u8, smax: f64, mode: LawMode, cache: Option<&std::path::Path>) -> Result<LimitLaw> {
    Ok(match cache {
        Some(dir) => limit_law_cached(dir, beta, smax, mode)?,
        None => limit_law(beta, smax, mode)?,
    })
}

fn cmd_experiment(config: &std::path::Path, out_dir: &std::path::Path, cache: Option<&std::path::Path>) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text).context("parsing config JSON")?;
    config.validate()?;
    let law = build_law(config.law_beta, config.law_s_max, config.law_mode, cache)?;
    let result = run_experiment_with_law(&config, &law)?;
    let paths = emit_outputs(&result, out_dir)?;
    for s in &result.sweeps {
        println!(
            "n = {:5}   E = {:.6} +- {:.6}   ({} trials, {} failed)",
            s.n, s.mean_distance, s.std_error, s.trials_used, s.failures
        );
    }
    match &result.fit {
        Some(f) => println!(
            "fit: -ln E = {:.4} ln n + {:.4}   (rms residual {:.2e})",
            f.slope, f.intercept, f.residual_rms
        ),
        None => println!("fit: skipped (needs at least 3 sweep points)"),
    }
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.json.display());
    println!("wrote {}", paths.svg.display());
    Ok(())
}

fn cmd_limit_law(beta: u8, smax: f64, mode: LawMode, out: &std::path::Path, cache: Option<&std::path::Path>) -> Result<()> {
    let law = build_law(beta, smax, mode, cache)?;
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    writeln!(file, "s,cdf,density,err")?;
    for i in 0..law.grid.len() {
        writeln!(file, "{},{},{},{}", law.grid[i], law.cdf[i], law.density[i], law.err_estimate)?;
    }
    file.flush()?;
    println!("wrote {} ({} rows, err estimate {:.2e})", out.display(), law.grid.len(), law.err_estimate);
    Ok(())
}

fn build_spec(
    ensemble: EnsembleArg,
    beta: Option<f64>,
    dist: Option<DistArg>,
    symmetry: Option<SymArg>,
    n: usize,
) -> Result<EnsembleSpec> {
    Ok(match ensemble {
        EnsembleArg::Gaussian => {
            let beta = beta.context("--beta is required for the gaussian ensemble")?;
            EnsembleSpec::gaussian(beta, n, 0)
        }
        EnsembleArg::Tridiagonal => {
            let beta = beta.context("--beta is required for the tridiagonal ensemble")?;
            EnsembleSpec::tridiagonal(beta, n, 0)
        }
        EnsembleArg::Wigner => {
            if beta.is_some() {
                bail!("wigner matrices take --dist and --symmetry, not --beta");
            }
            let dist = dist.context("--dist is required for wigner matrices")?;
            let symmetry = symmetry.context("--symmetry is required for wigner matrices")?;
            EnsembleSpec::wigner(dist.into(), symmetry.into(), n, 0)
        }
    })
}

fn cmd_sample(
    spec: &EnsembleSpec,
    trials: usize,
    seed: u64,
    out: &std::path::Path,
    emit_spacings: Option<&std::path::Path>,
    window: &Window,
) -> Result<()> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let mut spectra_file = std::io::BufWriter::new(
        std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    writeln!(spectra_file, "trial,index,lambda")?;
    // pooled spacing atoms: (position, weight contribution)
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    for trial in 0..trials {
        let trial_spec = spec.with_seed(derive_seed(seed, trial_salt(0, trial)));
        let spectrum = spectrum_of(sample(&trial_spec)?)?;
        for (index, lambda) in spectrum.values.iter().enumerate() {
            writeln!(spectra_file, "{trial},{index},{lambda}")?;
        }
        if emit_spacings.is_some() {
            let measure = spacing_measure(&spectrum, window)
                .with_context(|| format!("spacing measure for trial {trial}"))?;
            let share = measure.weight_per_atom() / trials as f64;
            for atom in measure.atoms() {
                pooled.push((atom.position, atom.multiplicity * share));
            }
        }
    }
    spectra_file.flush()?;
    println!("wrote {}", out.display());
    if let Some(path) = emit_spacings {
        pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atoms"));
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(file, "atom,weight")?;
        for (position, weight) in &pooled {
            writeln!(file, "{position},{weight}")?;
        }
        file.flush()?;
        println!("wrote {} ({} atoms over {} trials)", path.display(), pooled.len(), trials);
    }
    Ok(())
}

fn cmd_fit(input: &std::path::Path, json: Option<&std::path::Path>) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || lineno == 0 && line.starts_with('n') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            bail!("line {}: expected n,E_N[,stderr]", lineno + 1);
        }
        let n: f64 = fields[0].trim().parse().with_context(|| format!("line {}: n", lineno + 1))?;
        let e: f64 = fields[1].trim().parse().with_context(|| format!("line {}: E_N", lineno + 1))?;
        points.push((n, e));
    }
    let fit = fit_loglog(&points)?;
    println!(
        "fit over {} points: -ln E = {:.4} ln n + {:.4}   (rms residual {:.2e})",
        points.len(),
        fit.slope,
        fit.intercept,
        fit.residual_rms
    );
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&fit)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_kernel_eval(beta: u8, x: f64, y: f64, finite_n: Option<usize>, bulk_a: f64) -> Result<()> {
    if let Some(n) = finite_n {
        if beta != 2 {
            bail!("the finite-size kernel exists for beta 2 only");
        }
        let value = finite_n_gue_kernel(n, bulk_a, x, y)?;
        println!("k_n = {value:.12e}");
        return Ok(());
    }
    match beta {
        2 => println!("k = {:.12e}", sine_kernel(x, y)),
        1 | 4 => {
            let v = matrix_kernel(beta, x, y)?;
            println!("s  = {:.12e}", v.s);
            println!("d  = {:.12e}", v.d);
            println!("i  = {:.12e}", v.i);
            println!("st = {:.12e}", v.st);
        }
        other => bail!("kernels exist for beta 1, 2, 4; got {other}"),
    }
    Ok(())
}
