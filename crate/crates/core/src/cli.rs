//! The `hurstlab` command line: `simulate`, `estimate`, `mc-grid` and
//! `sessions`. Tables go to stdout (or `--out`) as CSV; diagnostics go to
//! stderr.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data or domain
//! errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, Method, MethodSpec};
use crate::mc::{run_grid_with, McConfig};
use crate::series::Series;
use crate::sessions::{
    load_ticks, session_hurst_series, write_sessions_csv, ColumnSpec, Granularity, ReturnMode,
    SessionSettings,
};
use crate::stable::{sample_stable, Seed, StableParams};

pub const SEED_ENV: &str = "HURSTLAB_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hurstlab", version, about = "Hurst exponent estimation under heavy tails")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw an alpha-stable sample, one value per line.
    Simulate(SimulateArgs),
    /// Estimate the Hurst exponent of a series of increments.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo grid over alpha, length and method.
    #[command(name = "mc-grid")]
    McGrid(McGridArgs),
    /// Per-day or per-month Hurst exponents from tick prices.
    Sessions(SessionsArgs),
}

#[derive(Debug, Clone, Args)]
struct EstimatorArgs {
    /// Base of the power-of-b window grid (R/S, MF-DFA)
    #[arg(long, default_value_t = 2)]
    scale_base: usize,
    /// Smallest window (R/S, MF-DFA)
    #[arg(long, default_value_t = 16)]
    min_scale: usize,
    /// Largest window as a fraction of the series length (R/S, MF-DFA)
    #[arg(long, default_value_t = 0.25)]
    max_scale_fraction: f64,
    /// Smallest moving-average window (DMA)
    #[arg(long, default_value_t = 20)]
    dma_lambda_min: usize,
    /// Largest moving-average window (DMA)
    #[arg(long, default_value_t = 40)]
    dma_lambda_max: usize,
    /// Smallest lag (GHE)
    #[arg(long, default_value_t = 1)]
    ghe_tau_min: usize,
    /// Largest lag (GHE)
    #[arg(long, default_value_t = 19)]
    ghe_tau_max: usize,
    /// Detrending polynomial order (MF-DFA; only 1 is supported)
    #[arg(long, default_value_t = 1)]
    detrend_order: usize,
}

impl EstimatorArgs {
    fn config(&self) -> Result<EstimatorConfig> {
        let cfg = EstimatorConfig {
            scale_base: self.scale_base,
            min_scale: self.min_scale,
            max_scale_fraction: self.max_scale_fraction,
            dma_lambda_min: self.dma_lambda_min,
            dma_lambda_max: self.dma_lambda_max,
            ghe_tau_min: self.ghe_tau_min,
            ghe_tau_max: self.ghe_tau_max,
            detrend_order: self.detrend_order,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Stability exponent in (0, 2]
    #[arg(long)]
    alpha: f64,
    /// Skewness in [-1, 1]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Scale; the default gives unit variance at alpha = 2
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    gamma: f64,
    /// Location
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Number of draws
    #[arg(long)]
    length: usize,
    /// Master seed (falls back to HURSTLAB_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Method as name[:q]: rs, dma, dfa, mfdfa:q, ghe:q
    #[arg(long)]
    method: String,
    /// Moment order for mfdfa or ghe (alternative to name:q)
    #[arg(long)]
    q: Option<f64>,
    /// Input file: one value per line, or CSV when --column is given
    #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
    input: Option<PathBuf>,
    /// Read the input from stdin
    #[arg(long)]
    stdin: bool,
    /// CSV column holding the increments
    #[arg(long)]
    column: Option<String>,
    /// Print the log-log regression points instead of the estimate
    #[arg(long)]
    points: bool,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct McGridArgs {
    /// Comma-separated stability exponents in (1, 2]
    #[arg(long, value_delimiter = ',', default_value = "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0")]
    alphas: Vec<f64>,
    /// Comma-separated base-2 logarithms of the series lengths
    #[arg(long, value_delimiter = ',', default_value = "9,10,11,12,13,14,15,16")]
    log2_lengths: Vec<u32>,
    /// Replications per (alpha, length)
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Comma-separated methods as name[:q]
    #[arg(long, value_delimiter = ',', default_value = "rs,dma,mfdfa:1,dfa,ghe:1,ghe:2")]
    methods: Vec<String>,
    /// Master seed (falls back to HURSTLAB_SEED)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Worker threads (default: available cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Suppress progress on stderr
    #[arg(long)]
    quiet: bool,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SessionsArgs {
    /// Tick CSV with a header row
    #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
    input: Option<PathBuf>,
    /// Read the ticks from stdin
    #[arg(long)]
    stdin: bool,
    #[arg(long, default_value = "timestamp")]
    timestamp_column: String,
    #[arg(long, default_value = "price")]
    price_column: String,
    /// chrono format string for timestamps (default: ISO-8601)
    #[arg(long)]
    timestamp_format: Option<String>,
    /// day or month
    #[arg(long, default_value = "day")]
    granularity: String,
    /// Method as name[:q]
    #[arg(long, default_value = "ghe:2")]
    method: String,
    /// Moment order for mfdfa or ghe (alternative to name:q)
    #[arg(long)]
    q: Option<f64>,
    /// log or simple
    #[arg(long, default_value = "log")]
    returns: String,
    /// Fewest returns a session needs (default: 128 daily, 1024 monthly)
    #[arg(long)]
    min_obs: Option<usize>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Worker threads (default: available cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Suppress progress on stderr
    #[arg(long)]
    quiet: bool,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs the verb. Returns the exit
/// code.
pub fn run_command<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate(args, stdout),
        Command::Estimate(args) => run_estimate(args, stdin, stdout),
        Command::McGrid(args) => mc_grid(args, stdout, stderr),
        Command::Sessions(args) => sessions(args, stdin, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "hurstlab: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<Seed> {
    if let Some(s) = flag {
        return Ok(Seed(s));
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.trim().parse().map(Seed).map_err(|_| {
            Error::InvalidParameter(format!("{SEED_ENV}='{raw}' is not an unsigned 64-bit integer"))
        }),
        Err(_) => Err(Error::InvalidParameter(format!(
            "no seed given: pass --seed or set {SEED_ENV}"
        ))),
    }
}

fn resolve_method(raw: &str, q: Option<f64>) -> Result<MethodSpec> {
    let spec: MethodSpec = raw.parse()?;
    let Some(q) = q else { return Ok(spec) };
    match spec.method {
        Method::Rs | Method::Dma => Err(Error::InvalidParameter(format!(
            "--q does not apply to method '{raw}'"
        ))),
        _ if raw.contains(':') && spec.q != q => Err(Error::InvalidParameter(format!(
            "--q {q} contradicts method '{raw}'"
        ))),
        _ if raw.trim().eq_ignore_ascii_case("dfa") && q != 2.0 => Err(Error::InvalidParameter(
            format!("dfa is q = 2; use mfdfa:{q}"),
        )),
        m => MethodSpec::new(m, q),
    }
}

fn with_output(out: Option<&PathBuf>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            body(stdout)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => job(),
        Some(0) => Err(Error::InvalidParameter("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(format!("cannot start thread pool: {e}")))?
            .install(job),
    }
}

fn open_input<'a>(path: Option<&PathBuf>, stdin: &'a mut dyn Read) -> Result<Box<dyn Read + 'a>> {
    match path {
        Some(p) => {
            let file = File::open(p).map_err(|e| Error::Io(format!("cannot open {}: {e}", p.display())))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(stdin)),
    }
}

fn simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let params = StableParams::new(args.alpha, args.beta, args.gamma, args.delta)?;
    if args.length == 0 {
        return Err(Error::InvalidParameter("--length must be at least 1".into()));
    }
    let values = sample_stable(params, args.length, seed)?;
    with_output(args.out.as_ref(), stdout, |w| {
        for v in &values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    })
}

/// Plain input: one number per line, blank lines ignored.
fn read_plain(source: impl Read) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Format(format!("line {}: '{t}' is not a number", i + 1)))?;
        values.push(v);
    }
    Ok(values)
}

fn read_column(source: impl Read, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let idx = headers.iter().position(|h| h == column).ok_or_else(|| {
        Error::Format(format!(
            "column '{column}' not found in header [{}]",
            headers.iter().collect::<Vec<_>>().join(", ")
        ))
    })?;
    let mut values = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let raw = row
            .get(idx)
            .ok_or_else(|| Error::Format(format!("line {line}: missing column '{column}'")))?;
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Format(format!("line {line}: '{raw}' in column '{column}' is not a number")))?;
        values.push(v);
    }
    Ok(values)
}

fn run_estimate(args: EstimateArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    let method = resolve_method(&args.method, args.q)?;
    let cfg = args.estimator.config()?;
    let source = open_input(args.input.as_ref(), stdin)?;
    let values = match &args.column {
        Some(c) => read_column(source, c)?,
        None => read_plain(source)?,
    };
    let series = Series::increments(values)?;
    let est = estimate(&series, method, &cfg)?;
    with_output(args.out.as_ref(), stdout, |w| {
        if args.points {
            writeln!(w, "log_scale,log_fluctuation")?;
            for (x, y) in &est.fit.points {
                writeln!(w, "{x},{y}")?;
            }
        } else {
            writeln!(w, "method,q,hurst,intercept,r_squared,n_points")?;
            writeln!(
                w,
                "{},{},{},{},{},{}",
                method.method,
                method.q,
                est.hurst,
                est.fit.intercept,
                est.fit.r_squared,
                est.fit.points.len()
            )?;
        }
        Ok(())
    })
}

fn mc_grid(args: McGridArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse())
        .collect::<Result<Vec<MethodSpec>>>()?;
    let config = McConfig {
        alphas: args.alphas.clone(),
        log2_lengths: args.log2_lengths.clone(),
        replications: args.reps,
        methods,
        master_seed: resolve_seed(args.seed)?,
        estimator_config: args.estimator.config()?,
    };
    config.validate()?;
    let quiet = args.quiet;
    let (progress_tx, progress_rx) = std::sync::mpsc::channel::<(usize, usize)>();
    let threads = args.threads;
    let config_ref = &config;
    let table = std::thread::scope(|scope| {
        let worker = scope.spawn(move || {
            with_threads(threads, || {
                run_grid_with(
                    config_ref,
                    |m, s, c| estimate(s, m, c).map(|e| e.hurst),
                    |done, total| {
                        let _ = progress_tx.send((done, total));
                    },
                )
            })
        });
        for (done, total) in progress_rx.iter() {
            if !quiet {
                let _ = writeln!(stderr, "mc-grid: {done}/{total} (alpha, length) pairs done");
            }
        }
        worker.join().expect("grid worker panicked")
    })?;
    for entry in &table.entries {
        if let Err(e) = &entry.outcome {
            let _ = writeln!(
                stderr,
                "warning: cell alpha={} log2_length={} method={} failed: {e}",
                entry.key.alpha, entry.key.log2_length, entry.key.method
            );
        }
    }
    with_output(args.out.as_ref(), stdout, |w| Ok(table.write_csv(w)?))
}

fn sessions(args: SessionsArgs, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let granularity: Granularity = args.granularity.parse()?;
    let mut settings = SessionSettings::new(granularity);
    settings.method = resolve_method(&args.method, args.q)?;
    settings.return_mode = args.returns.parse::<ReturnMode>()?;
    settings.estimator_config = args.estimator.config()?;
    if let Some(m) = args.min_obs {
        settings.min_obs = m;
    }
    let spec = ColumnSpec {
        timestamp_column: args.timestamp_column.clone(),
        price_column: args.price_column.clone(),
        timestamp_format: args.timestamp_format.clone(),
    };
    let source = open_input(args.input.as_ref(), stdin)?;
    let loaded = load_ticks(source, &spec)?;
    for r in &loaded.rejections {
        let _ = writeln!(stderr, "warning: line {} rejected: {}", r.line, r.reason);
    }
    let outcomes = with_threads(args.threads, || session_hurst_series(&loaded.records, &settings))?;
    if !args.quiet {
        let skipped = outcomes.iter().filter(|o| o.result.is_err()).count();
        let _ = writeln!(
            stderr,
            "sessions: {} estimated, {skipped} skipped, {} ticks read",
            outcomes.len() - skipped,
            loaded.records.len()
        );
        for o in outcomes.iter() {
            if let Err(reason) = &o.result {
                let _ = writeln!(stderr, "skipped {}: {reason}", o.key);
            }
        }
    }
    with_output(args.out.as_ref(), stdout, |w| Ok(write_sessions_csv(&outcomes, w)?))
}

/// Entry point used by the binary.
pub fn main_with_std() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_command(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}
