//! `grinterp`: runs the Grassmann interpolation experiments, convergence
//! studies, bound sweeps and maxvol row selection, writing CSV.
//!
//! Settings come from flags, then an optional `--config` file of `key=value`
//! lines, then built-in defaults. Outputs default to `$GRINTERP_OUT_DIR`
//! (or the working directory) when `--out` is not given.

mod config;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grassmann_interp::experiments::bounds::{self, write_bounds_csv};
use grassmann_interp::experiments::convergence::{write_errors_csv, write_slopes_csv};
use grassmann_interp::experiments::{
    linspace, run_convergence_study, run_experiment1, run_experiment2, write_records_csv,
    ConvergenceCurve, ErrorRecord, FnModelSpec, QrCurveSpec,
};
use grassmann_interp::matrix_io::load_matrix;
use grassmann_interp::maxvol::write_maxvol_csv;
use grassmann_interp::{make_stiefel, maxvol_rows, Error, MaxvolConfig};

use config::Layers;

pub const OUT_DIR_ENV: &str = "GRINTERP_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or preconditions.
    Usage(String),
    Core(Error),
    /// A bound sweep ran but saw violations.
    Violations(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Violations(k) => write!(f, "{k} bound check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Violations(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "grinterp",
    version,
    about = "Subspace interpolation experiments on the Grassmann manifold"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Interpolate the QR-factor subspace curve and record errors on a grid.
    Exp1(Exp1Args),
    /// Interpolate POD subspaces of the FitzHugh–Nagumo model in the applied voltage.
    Exp2(Exp2Args),
    /// Midpoint error against sampling step, with least-squares log-log slopes.
    Convergence(ConvergenceArgs),
    /// Randomized sweeps over the distance and conditioning bounds.
    Bounds(BoundsArgs),
    /// Maxvol row selection on a matrix read from a text file.
    Maxvol(MaxvolArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// key=value settings file; flags override it [default: none]
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random stream [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for grid evaluation; output order does not depend on it [default: 1]
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV; companion files get a suffix on its stem
    /// [default: $GRINTERP_OUT_DIR/<command>.csv, else ./<command>.csv]
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MaxvolOpts {
    /// Stop once every |entry of U·U₁⁻¹| ≤ 1 + delta [default: 0.01]
    #[arg(long)]
    delta: Option<f64>,
    /// Swap limit of the maxvol iteration [default: 100]
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args, Debug)]
struct Exp1Args {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    maxvol: MaxvolOpts,
    /// Ambient dimension [default: 1000, reference setting]
    #[arg(long)]
    n: Option<usize>,
    /// Subspace dimension [default: 10, reference setting]
    #[arg(long)]
    p: Option<usize>,
    /// Evaluation points, equispaced on [0, 1] including both ends [default: 101]
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct Exp2Args {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    maxvol: MaxvolOpts,
    /// Spatial grid nodes [default: 256; 1024 with --full-scale]
    #[arg(long)]
    n_x: Option<usize>,
    /// POD rank [default: 8, reference setting]
    #[arg(long)]
    p: Option<usize>,
    /// Evaluation points per voltage interval, ends included [default: 11]
    #[arg(long)]
    grid: Option<usize>,
    /// Use the 1024-node reference discretization
    #[arg(long)]
    full_scale: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CurveKind {
    Qr,
    Geodesic,
}

impl std::str::FromStr for CurveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    maxvol: MaxvolOpts,
    /// Test curve [default: qr]
    #[arg(long, value_enum)]
    curve: Option<CurveKind>,
    /// Ambient dimension [default: 100]
    #[arg(long)]
    n: Option<usize>,
    /// Subspace dimension [default: 5]
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated, strictly decreasing sampling steps [default: 0.4,0.2,0.1,0.05]
    #[arg(long, value_name = "LIST")]
    hs: Option<String>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct MaxvolArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    maxvol: MaxvolOpts,
    /// Matrix text file: a `rows cols` header, then one whitespace-separated
    /// line per row; `#` lines are skipped
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

const COMMON_KEYS: [&str; 3] = ["seed", "threads", "out"];
const MAXVOL_KEYS: [&str; 2] = ["delta", "max_iters"];

fn keys(extra: &[&'static str], maxvol: bool) -> Vec<&'static str> {
    let mut k: Vec<&str> = COMMON_KEYS.to_vec();
    if maxvol {
        k.extend(MAXVOL_KEYS);
    }
    k.extend(extra);
    k
}

/// Settings every subcommand shares, after layering.
struct Base {
    layers: Layers,
    seed: u64,
    out: PathBuf,
}

fn resolve_common(
    common: &Common,
    name: &str,
    extra: &[&'static str],
    maxvol: bool,
) -> Result<Base, CliError> {
    let layers = Layers::load(common.config.as_deref())?;
    layers.check_known(&keys(extra, maxvol))?;
    let seed = layers.pick("seed", common.seed, 42)?;
    let threads = layers.pick("threads", common.threads, 1usize)?;
    if threads == 0 {
        return Err(CliError::Usage("--threads must be ≥ 1".into()));
    }
    // a second call in the same process (tests) keeps the first pool
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        log::debug!("thread pool already configured: {e}");
    }
    let out = match layers.pick_opt::<PathBuf>("out", common.out.clone())? {
        Some(p) => p,
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| ".".into());
            dir.join(format!("{name}.csv"))
        }
    };
    Ok(Base { layers, seed, out })
}

fn resolve_maxvol(layers: &Layers, opts: &MaxvolOpts) -> Result<MaxvolConfig, CliError> {
    let d = MaxvolConfig::default();
    let cfg = MaxvolConfig {
        delta: layers.pick("delta", opts.delta, d.delta)?,
        max_iters: layers.pick("max_iters", opts.max_iters, d.max_iters)?,
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `dir/stem.csv` → `dir/stem_suffix.csv`.
fn companion(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
    }
    let file = File::create(path)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn max_by_scheme(records: &[ErrorRecord]) -> Vec<(&'static str, f64)> {
    let mut out: Vec<(&'static str, f64)> = Vec::new();
    for r in records {
        match out.iter_mut().find(|(s, _)| *s == r.scheme) {
            Some(entry) => entry.1 = entry.1.max(r.rel_error),
            None => out.push((r.scheme, r.rel_error)),
        }
    }
    out
}

fn print_max_errors(label: &str, records: &[ErrorRecord]) {
    for (scheme, err) in max_by_scheme(records) {
        println!("{label}{scheme:<15} max rel_error {err:.3e}");
    }
}

fn exp1(args: &Exp1Args) -> Result<(), CliError> {
    let base = resolve_common(&args.common, "exp1", &["n", "p", "grid"], true)?;
    let l = &base.layers;
    let frame_cfg = resolve_maxvol(l, &args.maxvol)?;
    let spec = QrCurveSpec::new(
        l.pick("n", args.n, 1000)?,
        l.pick("p", args.p, 10)?,
        base.seed,
    );
    spec.validate()?;
    let grid = l.pick("grid", args.grid, 101usize)?;
    if grid < 2 {
        return Err(CliError::Usage(format!("--grid must be ≥ 2, got {grid}")));
    }
    let out = run_experiment1(&spec, &linspace(0.0, 1.0, grid), &frame_cfg)?;
    write_records_csv(create(&base.out)?, &out.records)?;
    let maxvol_path = companion(&base.out, "maxvol");
    write_maxvol_csv(create(&maxvol_path)?, &out.maxvol)?;
    print_max_errors("", &out.records);
    println!(
        "wrote {} records to {}",
        out.records.len(),
        base.out.display()
    );
    println!("wrote maxvol report to {}", maxvol_path.display());
    Ok(())
}

fn exp2(args: &Exp2Args) -> Result<(), CliError> {
    let base = resolve_common(
        &args.common,
        "exp2",
        &["n_x", "p", "grid", "full_scale"],
        true,
    )?;
    let l = &base.layers;
    let frame_cfg = resolve_maxvol(l, &args.maxvol)?;
    let full = args.full_scale || l.pick("full_scale", None, false)?;
    let defaults = if full {
        FnModelSpec::full_scale()
    } else {
        FnModelSpec::default()
    };
    let spec = FnModelSpec {
        n_x: l.pick("n_x", args.n_x, defaults.n_x)?,
        p: l.pick("p", args.p, defaults.p)?,
        ..defaults
    };
    spec.validate()?;
    let grid = l.pick("grid", args.grid, 11usize)?;
    let out = run_experiment2(&spec, grid, &frame_cfg, &MaxvolConfig::degraded())?;
    let files = [
        (base.out.clone(), &out.records),
        (companion(&base.out, "degraded"), &out.degraded_records),
    ];
    for (path, records) in &files {
        write_records_csv(create(path)?, records)?;
    }
    let reports = [
        (companion(&base.out, "maxvol"), &out.maxvol),
        (
            companion(&base.out, "degraded_maxvol"),
            &out.degraded_maxvol,
        ),
    ];
    for (path, rows) in &reports {
        write_maxvol_csv(create(path)?, rows)?;
    }
    print_max_errors("", &out.records);
    print_max_errors("truncated maxvol: ", &out.degraded_records);
    for path in files
        .iter()
        .map(|f| &f.0)
        .chain(reports.iter().map(|r| &r.0))
    {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_steps(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("--hs entry {s:?}: {e}")))
        })
        .collect()
}

fn convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let base = resolve_common(
        &args.common,
        "convergence",
        &["curve", "n", "p", "hs"],
        true,
    )?;
    let l = &base.layers;
    let frame_cfg = resolve_maxvol(l, &args.maxvol)?;
    let (n, p) = (l.pick("n", args.n, 100usize)?, l.pick("p", args.p, 5usize)?);
    let curve = match l.pick("curve", args.curve, CurveKind::Qr)? {
        CurveKind::Qr => {
            let spec = QrCurveSpec::new(n, p, base.seed);
            spec.validate()?;
            ConvergenceCurve::Qr(spec)
        }
        CurveKind::Geodesic => {
            if p == 0 || p >= n {
                return Err(CliError::Usage(format!(
                    "need 1 ≤ p < n, got n = {n}, p = {p}"
                )));
            }
            ConvergenceCurve::Geodesic {
                n,
                p,
                seed: base.seed,
            }
        }
    };
    let hs = parse_steps(&l.pick("hs", args.hs.clone(), "0.4,0.2,0.1,0.05".to_string())?)?;
    let study = run_convergence_study(&curve, &hs, &frame_cfg)?;
    write_slopes_csv(create(&base.out)?, &study.slopes)?;
    let errors_path = companion(&base.out, "errors");
    write_errors_csv(create(&errors_path)?, &study)?;
    for row in &study.slopes {
        println!("{:<15} slope {:>6.3}", row.scheme, row.slope);
    }
    println!("wrote {} and {}", base.out.display(), errors_path.display());
    Ok(())
}

fn bounds_cmd(args: &BoundsArgs) -> Result<(), CliError> {
    let base = resolve_common(&args.common, "bounds", &[], false)?;
    let checks = bounds::run_all(base.seed);
    write_bounds_csv(create(&base.out)?, &checks)?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed());
        println!(
            "{tag} {:<40} samples {:>5}  violations {:>3}  worst margin {:>10.3e}  max observed {:.6}",
            c.name, c.samples, c.violations, c.worst_margin, c.max_observed
        );
    }
    println!("wrote {}", base.out.display());
    if failed > 0 {
        return Err(CliError::Violations(failed));
    }
    Ok(())
}

fn maxvol_cmd(args: &MaxvolArgs) -> Result<(), CliError> {
    let base = resolve_common(&args.common, "maxvol", &["in"], true)?;
    let l = &base.layers;
    let cfg = resolve_maxvol(l, &args.maxvol)?;
    let Some(input) = l.pick_opt::<PathBuf>("in", args.input.clone())? else {
        return Err(CliError::Usage("maxvol needs --in FILE".into()));
    };
    let u = make_stiefel(load_matrix(&input)?)?;
    let report = maxvol_rows(&u, &cfg)?;
    write_maxvol_csv(create(&base.out)?, &[report.row(0)])?;
    let perm: Vec<String> = report.frame.perm().iter().map(usize::to_string).collect();
    println!("pivot rows        {:?}", report.frame.pivot_rows());
    println!("permutation       {}", perm.join(" "));
    println!("swaps             {}", report.iters);
    println!("converged         {}", report.converged);
    println!("max |C_ij|        {:.6}", report.final_max_entry);
    println!("‖U₁⁻¹‖_F before   {:.6e}", report.inv_norm_before);
    println!("‖U₁⁻¹‖_F after    {:.6e}", report.inv_norm_after);
    println!("wrote {}", base.out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Exp1(a) => exp1(a),
        Command::Exp2(a) => exp2(a),
        Command::Convergence(a) => convergence(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Maxvol(a) => maxvol_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
