//! `charpath`: character paths modulo odd primes, samples of the limiting
//! random Fourier series, moment computations and tail statistics.
//!
//! Every command is deterministic given its flags and seed; thread count
//! never changes output bytes.

mod config;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use charpath_core::dirichlet::DirichletError;
use charpath_core::export::{
    svg_polyline, write_path_csv, write_tail_csv, EnsembleManifest, MomentRecord,
};
use charpath_core::moments::{m_limit, mq_direct, mq_sigma, MomentError, MomentSpec};
use charpath_core::series::{sample_ensemble, EtaMode, SeriesError};
use charpath_core::stats::{phi_limit, phi_q};
use charpath_core::steinhaus::Sign;
use charpath_core::{Parity, PathGrid, PrimeContext, SeriesForm, SeriesSpec, Truncation};

use config::{OutputFormat, RunConfig};

/// Full-family scans refuse moduli past this; the quadratic work would
/// leave desk scale.
const FAMILY_SCAN_LIMIT: u64 = 1_000_000;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE_LIMIT: u8 = 3;

#[derive(Debug)]
enum CliError {
    /// Bad arguments or invalid input values → exit 2.
    Usage(String),
    /// Work refused by a compute guard → exit 3.
    ComputeLimit(String),
    /// Runtime failure (I/O, failed verification) → exit 1.
    Failure(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

impl From<DirichletError> for CliError {
    fn from(e: DirichletError) -> Self {
        match e {
            DirichletError::NotPrime(_) => {
                CliError::Usage("modulus must be an odd prime".to_string())
            }
            DirichletError::TableLimit { .. } => CliError::ComputeLimit(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::TooLarge(_) => CliError::ComputeLimit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "charpath",
    version,
    about = "Character paths modulo odd primes and their limiting random series"
)]
struct Cli {
    /// Seed for every randomised computation (overrides CHARPATH_SEED and config)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = automatic); output bytes do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for discrete-log cache files (overrides CHARPATH_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Config file with flat key = value lines (default: ./charpath.toml if present)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one character path and write it as CSV or SVG
    Path(PathArgs),
    /// Draw samples of the limiting series F (plus/minus/general form)
    SampleF(SampleFArgs),
    /// Compute a joint moment (direct family average, divisor-sum form, or limit)
    Moment(MomentArgs),
    /// Run a named verification suite
    Verify(VerifyArgs),
    /// Tail distribution of the path maximum (character family or Monte Carlo)
    Phi(PhiArgs),
}

#[derive(Args)]
struct PathArgs {
    /// Odd prime modulus
    #[arg(long)]
    q: u64,
    /// Character index in [0, q-2]
    #[arg(long)]
    chi: u32,
    /// Grid: "vertex" or "uniform:<points>"
    #[arg(long, default_value = "vertex")]
    grid: String,
    /// csv or svg
    #[arg(long)]
    format: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleFArgs {
    /// plus | minus | general
    #[arg(long, default_value = "minus")]
    parity: String,
    /// Sign of X_{-1} for the general form: "+1" or "-1"
    #[arg(long)]
    sign: Option<String>,
    /// Number of series terms
    #[arg(long)]
    terms: Option<u32>,
    /// Grid points
    #[arg(long)]
    grid: Option<usize>,
    /// Number of samples (streams 0..count)
    #[arg(long, default_value_t = 1)]
    count: u32,
    /// Keep only y-smooth indices
    #[arg(long)]
    smooth: Option<u32>,
    /// csv or svg
    #[arg(long)]
    format: Option<String>,
    /// Output stem: writes <stem>_<i>.<ext> plus <stem>_manifest.json
    #[arg(long, default_value = "sample")]
    out: PathBuf,
}

#[derive(Args)]
struct MomentArgs {
    /// direct | sigma | limit
    #[arg(long)]
    method: String,
    /// Modulus (required for direct and sigma)
    #[arg(long)]
    q: Option<u64>,
    /// Comma-separated times; each decimal or a rational like 3/101
    #[arg(long)]
    t: String,
    /// Comma-separated exponents of f
    #[arg(long)]
    n: String,
    /// Comma-separated exponents of conj(f)
    #[arg(long)]
    m: String,
    /// odd | even
    #[arg(long, default_value = "odd")]
    parity: String,
    /// Divisor-sum cutoff for the limit method
    #[arg(long)]
    truncate: Option<u64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// orthogonality | gauss | divisor | deligne | tail | ramanujan
    suite: String,
}

#[derive(Args)]
struct PhiArgs {
    /// Odd prime modulus (character mode)
    #[arg(long)]
    q: Option<u64>,
    /// Monte Carlo mode over the limiting series
    #[arg(long, default_value_t = false)]
    limit: bool,
    /// Threshold grid start:end:count (inclusive, linear)
    #[arg(long)]
    taus: String,
    /// odd | even | all (character mode); minus | plus (limit mode)
    #[arg(long, default_value = "odd")]
    parity: String,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<u32>,
    /// Series terms (limit mode)
    #[arg(long)]
    terms: Option<u32>,
    /// Grid points for the series sup-norm
    #[arg(long)]
    grid: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::ComputeLimit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_COMPUTE_LIMIT)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let config_path = cli
        .config
        .clone()
        .or_else(|| {
            let default = PathBuf::from("charpath.toml");
            default.is_file().then_some(default)
        });
    if let Some(path) = config_path {
        cfg.load_file(&path).map_err(CliError::Usage)?;
    }
    cfg.load_env().map_err(CliError::Usage)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Path(args) => cmd_path(&cfg, args),
        Command::SampleF(args) => cmd_sample_f(&cfg, args),
        Command::Moment(args) => cmd_moment(&cfg, args),
        Command::Verify(args) => cmd_verify(args),
        Command::Phi(args) => cmd_phi(&cfg, args),
    }
}

fn build_context(cfg: &RunConfig, q: u64) -> Result<PrimeContext, CliError> {
    match &cfg.cache_dir {
        Some(dir) => Ok(PrimeContext::with_cache(q, dir)?),
        None => Ok(PrimeContext::new(q)?),
    }
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn parse_grid(spec: &str, q: u64) -> Result<PathGrid, CliError> {
    if spec == "vertex" {
        return Ok(PathGrid::vertex(q as u32));
    }
    if let Some(points) = spec.strip_prefix("uniform:") {
        let n: usize = points
            .parse()
            .map_err(|_| CliError::usage(format!("bad grid size {points:?}")))?;
        if n < 2 {
            return Err(CliError::usage("uniform grid needs at least 2 points"));
        }
        return Ok(PathGrid::uniform(n));
    }
    Err(CliError::usage(format!(
        "unknown grid {spec:?} (vertex | uniform:<points>)"
    )))
}

fn parse_format(
    explicit: Option<&str>,
    cfg: &RunConfig,
    allowed: &[OutputFormat],
) -> Result<OutputFormat, CliError> {
    let format = match explicit {
        Some(s) => s.parse::<OutputFormat>().map_err(CliError::Usage)?,
        None => cfg.format.clone(),
    };
    if !allowed.contains(&format) {
        return Err(CliError::usage("format not supported by this command"));
    }
    Ok(format)
}

/// Times accept "j/q" rationals so vertex abscissae avoid decimal rounding.
fn parse_time(s: &str) -> Result<f64, CliError> {
    let value = if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad rational {s:?}")))?;
        let den: u64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad rational {s:?}")))?;
        if den == 0 {
            return Err(CliError::usage("zero denominator"));
        }
        num as f64 / den as f64
    } else {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("bad time {s:?}")))?
    };
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::usage(format!("time {s:?} outside [0, 1]")));
    }
    Ok(value)
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("bad integer {part:?}")))
        })
        .collect()
}

fn parse_parity(s: &str) -> Result<Parity, CliError> {
    match s {
        "odd" => Ok(Parity::Odd),
        "even" => Ok(Parity::Even),
        other => Err(CliError::usage(format!("bad parity {other:?} (odd|even)"))),
    }
}

/// start:end:count, inclusive endpoints, linear spacing.
fn parse_taus(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "bad tau grid {s:?} (want start:end:count)"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::usage(format!("bad tau start {:?}", parts[0])))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::usage(format!("bad tau end {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("bad tau count {:?}", parts[2])))?;
    if count == 0 || end < start {
        return Err(CliError::usage("tau grid must be non-empty and increasing"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                end
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

fn cmd_path(cfg: &RunConfig, args: PathArgs) -> Result<(), CliError> {
    let ctx = build_context(cfg, args.q)?;
    let chi = ctx
        .character(args.chi)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let grid = parse_grid(&args.grid, args.q)?;
    let format = parse_format(args.format.as_deref(), cfg, &[OutputFormat::Csv, OutputFormat::Svg])?;
    let path = chi.sample_path(&grid);
    let bytes = match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_path_csv(&mut buf, path.grid.points(), &path.values)?;
            buf
        }
        OutputFormat::Svg => svg_polyline(&path.values).into_bytes(),
        OutputFormat::Json => unreachable!(),
    };
    write_output(args.out.as_ref(), &bytes)
}

fn cmd_sample_f(cfg: &RunConfig, args: SampleFArgs) -> Result<(), CliError> {
    let form = match args.parity.as_str() {
        "plus" => SeriesForm::Plus,
        "minus" => SeriesForm::Minus,
        "general" => {
            let sign = match args.sign.as_deref() {
                Some("+1") | Some("plus") => Sign::Plus,
                Some("-1") | Some("minus") => Sign::Minus,
                Some(other) => {
                    return Err(CliError::usage(format!("bad sign {other:?} (+1|-1)")))
                }
                None => return Err(CliError::usage("general form needs --sign +1|-1")),
            };
            SeriesForm::General(sign)
        }
        other => {
            return Err(CliError::usage(format!(
                "bad parity {other:?} (plus|minus|general)"
            )))
        }
    };
    let n_terms = args.terms.unwrap_or(cfg.truncation);
    if n_terms == 0 {
        return Err(CliError::usage("--terms must be at least 1"));
    }
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let grid_points = args.grid.unwrap_or(cfg.grid);
    if grid_points < 2 {
        return Err(CliError::usage("--grid must be at least 2"));
    }
    let truncation = match args.smooth {
        Some(y) if y < 2 => return Err(CliError::usage("--smooth must be at least 2")),
        Some(y) => Truncation::Smooth { y, cap: n_terms },
        None => Truncation::Symmetric(n_terms),
    };
    let format = parse_format(args.format.as_deref(), cfg, &[OutputFormat::Csv, OutputFormat::Svg])?;
    let spec = SeriesSpec {
        form,
        truncation,
        grid: PathGrid::uniform(grid_points),
        eta_mode: EtaMode::Sampled,
    };
    let samples = sample_ensemble(&spec, args.count, cfg.seed)?;
    let stem = args.out.clone();
    let width = (args.count as usize).max(2).to_string().len().max(3);
    for (i, sample) in samples.iter().enumerate() {
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
            OutputFormat::Json => unreachable!(),
        };
        let file = with_suffix(&stem, &format!("_{i:0width$}.{ext}"));
        let bytes = match format {
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                write_path_csv(&mut buf, sample.grid.points(), &sample.values)?;
                buf
            }
            OutputFormat::Svg => svg_polyline(&sample.values).into_bytes(),
            OutputFormat::Json => unreachable!(),
        };
        std::fs::write(&file, bytes)?;
    }
    let manifest = EnsembleManifest::from_samples(&samples);
    let manifest_path = with_suffix(&stem, "_manifest.json");
    std::fs::write(&manifest_path, manifest.to_json().into_bytes())?;
    println!(
        "wrote {} sample(s) and {}",
        samples.len(),
        manifest_path.display()
    );
    Ok(())
}

fn with_suffix(stem: &std::path::Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_moment(cfg: &RunConfig, args: MomentArgs) -> Result<(), CliError> {
    let times = args
        .t
        .split(',')
        .map(parse_time)
        .collect::<Result<Vec<f64>, _>>()?;
    let n_pows = parse_u32_list(&args.n)?;
    let m_pows = parse_u32_list(&args.m)?;
    let parity = parse_parity(&args.parity)?;
    let spec = MomentSpec::new(times, n_pows, m_pows, parity).map_err(CliError::from)?;
    let (record_q, result) = match args.method.as_str() {
        "limit" => {
            let cutoff = args.truncate.unwrap_or(100_000);
            if cutoff > 1 << 30 {
                return Err(CliError::ComputeLimit(
                    "divisor-sum cutoff past desk scale".to_string(),
                ));
            }
            (None, m_limit(&spec, cutoff))
        }
        "direct" => {
            let q = args
                .q
                .ok_or_else(|| CliError::usage("--method direct requires --q"))?;
            if q > FAMILY_SCAN_LIMIT {
                return Err(CliError::ComputeLimit(format!(
                    "family scan refused for q > {FAMILY_SCAN_LIMIT}"
                )));
            }
            let ctx = build_context(cfg, q)?;
            (Some(q), mq_direct(&ctx, &spec))
        }
        "sigma" => {
            let q = args
                .q
                .ok_or_else(|| CliError::usage("--method sigma requires --q"))?;
            if q > FAMILY_SCAN_LIMIT {
                return Err(CliError::ComputeLimit(format!(
                    "divisor scan refused for q > {FAMILY_SCAN_LIMIT}"
                )));
            }
            (Some(q), mq_sigma(q, &spec)?)
        }
        other => {
            return Err(CliError::usage(format!(
                "bad method {other:?} (direct|sigma|limit)"
            )))
        }
    };
    let record = MomentRecord::new(record_q, &spec, &result);
    let mut text = record.to_json();
    text.push('\n');
    write_output(args.out.as_ref(), text.as_bytes())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let checks = match args.suite.as_str() {
        "orthogonality" => verify::orthogonality(),
        "gauss" => verify::gauss(),
        "divisor" => verify::divisor(),
        "deligne" => verify::deligne(),
        "tail" => verify::tail(),
        "ramanujan" => verify::ramanujan(),
        other => {
            return Err(CliError::usage(format!(
                "unknown suite {other:?} (orthogonality|gauss|divisor|deligne|tail|ramanujan)"
            )))
        }
    };
    if verify::report(&checks) {
        Ok(())
    } else {
        Err(CliError::Failure(format!("suite {} failed", args.suite)))
    }
}

fn cmd_phi(cfg: &RunConfig, args: PhiArgs) -> Result<(), CliError> {
    let taus = parse_taus(&args.taus)?;
    let curve = if args.limit {
        let samples = args
            .samples
            .ok_or_else(|| CliError::usage("--limit mode requires --samples"))?;
        if samples == 0 {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        let form = match args.parity.as_str() {
            "minus" | "odd" => SeriesForm::Minus,
            "plus" | "even" => SeriesForm::Plus,
            other => {
                return Err(CliError::usage(format!(
                    "bad parity {other:?} for limit mode (minus|plus)"
                )))
            }
        };
        let n_terms = args.terms.unwrap_or(cfg.truncation);
        let grid = args.grid.unwrap_or(cfg.grid.max(2));
        phi_limit(&taus, samples, n_terms, grid, form, cfg.seed)
    } else {
        let q = args
            .q
            .ok_or_else(|| CliError::usage("character mode requires --q (or pass --limit)"))?;
        if q > FAMILY_SCAN_LIMIT {
            return Err(CliError::ComputeLimit(format!(
                "family scan refused for q > {FAMILY_SCAN_LIMIT}"
            )));
        }
        let parity = match args.parity.as_str() {
            "all" => None,
            other => Some(parse_parity(other)?),
        };
        let ctx = build_context(cfg, q)?;
        phi_q(&ctx, &taus, parity)
    };
    let mut buf = Vec::new();
    write_tail_csv(&mut buf, &curve)?;
    write_output(args.out.as_ref(), &buf)
}
