//! `star-ci` command-line front end.
//!
//! Exit codes: 0 success, 2 malformed input or usage, 3 observation out of
//! range for the method, 4 missing required flag, 5 unwritable output,
//! 6 eCDF plot requested without `--n`.

use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use star_ci::bench::{
    read_csv, run_benchmark, summarize, wealth_diagnostics, write_csv, DistributionSpec,
    ExperimentConfig, Mode,
};
use star_ci::interval::GridSpec;
use star_ci::method::{evaluate, Method, MethodSettings, Side};
use star_ci::rng::Stream;
use star_ci::strategy::StrategyConfig;
use star_ci::{Error, Sample};

pub mod plot;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_OUT_OF_RANGE: u8 = 3;
pub const EXIT_MISSING_FLAG: u8 = 4;
pub const EXIT_UNWRITABLE: u8 = 5;
pub const EXIT_ECDF_NEEDS_N: u8 = 6;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "STAR_CI_THREADS";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn missing(flag: &str) -> Self {
        Self::new(EXIT_MISSING_FLAG, format!("missing required flag --{flag}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ObservationOutOfRange { .. } | Error::NotBinary { .. } => EXIT_OUT_OF_RANGE,
            _ => EXIT_MALFORMED,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "star-ci",
    version,
    about = "Confidence intervals for bounded means by betting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a confidence interval from a data file.
    Ci(CiArgs),
    /// Run a Monte Carlo coverage/width experiment and write a CSV.
    Bench(BenchArgs),
    /// Final wealth per candidate mean and a wealth trajectory.
    Diagnose(DiagnoseArgs),
    /// Render an SVG chart from a bench CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct CiArgs {
    /// One observation per line; `#` starts a comment.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value = "star-bets")]
    method: String,
    #[arg(long, default_value_t = star_ci::interval::DEFAULT_GRID_CELLS)]
    grid: usize,
    /// two, lower or upper.
    #[arg(long, default_value = "two")]
    side: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Known variance, required by the Bernstein methods.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Disable last-round randomization of the betting methods.
    #[arg(long)]
    no_randomize: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// bernoulli:P, beta:A:B or point:X.
    #[arg(long)]
    dist: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Comma-separated method ids.
    #[arg(long, default_value = "star-bets")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// two or lower.
    #[arg(long, default_value = "two")]
    mode: String,
    /// Reuse one sample per n and only permute it per repetition.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, default_value_t = star_ci::interval::DEFAULT_GRID_CELLS)]
    grid: usize,
    #[arg(long)]
    no_randomize: bool,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Data file; alternatively draw a sample with --dist and --n.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// A betting method id.
    #[arg(long, default_value = "star-bets")]
    method: String,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Number of cells of the candidate-mean grid.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Candidate mean whose trajectory is reported.
    #[arg(long, default_value_t = 0.85)]
    trace_m: f64,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// widths or ecdf.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample size whose eCDF is drawn.
    #[arg(long)]
    n: Option<usize>,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
        }
    };
    // buffered so the command can run inside a (Send-only) thread pool
    let (result, out) = with_thread_cap(move || {
        let mut out = Vec::new();
        let result = match cli.command {
            Command::Ci(args) => cmd_ci(args, &mut out),
            Command::Bench(args) => cmd_bench(args, &mut out),
            Command::Diagnose(args) => cmd_diagnose(args, &mut out),
            Command::Plot(args) => cmd_plot(args),
        };
        (result, out)
    });
    let _ = stdout.write_all(&out);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}

fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok());
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Parses one observation per line, skipping blank lines and `#` comments.
pub fn parse_observations(text: &str) -> CliResult<Sample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            CliError::new(
                EXIT_MALFORMED,
                format!("line {}: `{line}` is not a number", i + 1),
            )
        })?;
        if !(0.0..=1.0).contains(&x) {
            return Err(CliError::new(
                EXIT_OUT_OF_RANGE,
                format!("line {}: observation {x} is outside [0, 1]", i + 1),
            ));
        }
        values.push(x);
    }
    if values.is_empty() {
        return Err(CliError::new(
            EXIT_MALFORMED,
            "input contains no observations",
        ));
    }
    Ok(Sample::new(values)?)
}

fn read_sample(path: &Path) -> CliResult<Sample> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::new(
            EXIT_MALFORMED,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    parse_observations(&text)
}

fn create_output(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        CliError::new(
            EXIT_UNWRITABLE,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| {
        CliError::new(
            EXIT_UNWRITABLE,
            format!("cannot write {}: {e}", path.display()),
        )
    }
}

fn check_sigma2(method: Method, sigma2: Option<f64>) -> CliResult<()> {
    if method.needs_variance() && sigma2.is_none() {
        return Err(CliError::missing("sigma2"));
    }
    Ok(())
}

fn cmd_ci(args: CiArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let method: Method = args.method.parse()?;
    let side: Side = args.side.parse()?;
    let input = args.input.ok_or_else(|| CliError::missing("input"))?;
    check_sigma2(method, args.sigma2)?;
    let sample = read_sample(&input)?;
    if method.binary_only() && !sample.is_binary() {
        return Err(CliError::new(
            EXIT_OUT_OF_RANGE,
            format!("{} requires {{0,1}} values", method.id()),
        ));
    }
    let settings = MethodSettings {
        grid: GridSpec::new(args.grid)?,
        sigma_sq: args.sigma2,
        randomize: !args.no_randomize,
    };
    let (lower, upper) = evaluate(method, &sample, args.delta, side, &settings, args.seed)?;
    writeln!(
        stdout,
        "{},{},{},{},{},{}",
        method.id(),
        sample.len(),
        args.delta,
        lower,
        upper,
        upper - lower
    )
    .map_err(|e| CliError::new(EXIT_UNWRITABLE, e.to_string()))
}

fn parse_n_list(list: &str) -> CliResult<Vec<usize>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::new(EXIT_MALFORMED, format!("bad sample size `{s}`")))
        })
        .collect()
}

fn cmd_bench(args: BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let dist: DistributionSpec = args
        .dist
        .ok_or_else(|| CliError::missing("dist"))?
        .parse()?;
    let n_list = parse_n_list(&args.n.ok_or_else(|| CliError::missing("n"))?)?;
    let out = args.out.ok_or_else(|| CliError::missing("out"))?;
    let methods = Method::parse_list(&args.methods)?;

    let mut cfg = ExperimentConfig::new(dist, n_list, methods);
    cfg.reps = args.reps;
    cfg.delta = args.delta;
    cfg.seed = args.seed;
    cfg.mode = args.mode.parse()?;
    cfg.shuffle_only = args.shuffle;
    cfg.grid = GridSpec::new(args.grid)?;
    cfg.randomize = !args.no_randomize;
    cfg.validate()?;

    // fail on an unwritable path before spending time on the experiment
    let mut writer = create_output(&out)?;
    let records = run_benchmark(&cfg)?;
    write_csv(&records, &mut writer).map_err(write_err(&out))?;

    let delta_note = match cfg.mode {
        Mode::TwoSided => format!("two-sided, delta/2 = {} per side", cfg.delta / 2.0),
        Mode::LowerOnly => format!("lower bounds only, delta = {}", cfg.delta),
    };
    let mut report = format!(
        "# {} reps={} seed={} ({delta_note})\n{:<18} {:>6} {:>12} {:>12} {:>9} {:>21} {:>6}\n",
        dist,
        cfg.reps,
        cfg.seed,
        "method",
        "n",
        "mean_width",
        "mean_dist",
        "coverage",
        "coverage_ci95",
        "zero_w"
    );
    for s in summarize(&records, dist.mean()) {
        let coverage = s
            .coverage
            .map_or_else(|| "-".to_string(), |c| format!("{c:.4}"));
        let ci = s
            .coverage_ci
            .map_or_else(|| "-".to_string(), |(lo, hi)| format!("[{lo:.4}, {hi:.4}]"));
        report.push_str(&format!(
            "{:<18} {:>6} {:>12.6} {:>12.6} {:>9} {:>21} {:>6}\n",
            s.method, s.n, s.mean_width, s.mean_lower_distance, coverage, ci, s.zero_width
        ));
    }
    stdout
        .write_all(report.as_bytes())
        .map_err(|e| CliError::new(EXIT_UNWRITABLE, e.to_string()))
}

fn cmd_diagnose(args: DiagnoseArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let method: Method = args.method.parse()?;
    let Method::Betting(rule) = method else {
        return Err(CliError::new(
            EXIT_MALFORMED,
            format!("diagnose needs a betting method, got {}", method.id()),
        ));
    };
    check_sigma2(method, args.sigma2)?;
    let sample = match (&args.input, &args.dist, args.n) {
        (Some(path), _, _) => read_sample(path)?,
        (None, Some(dist), Some(n)) if n > 0 => {
            let dist: DistributionSpec = dist.parse()?;
            dist.sample(n, &mut Stream::new(args.seed).rng())
        }
        (None, Some(_), _) => return Err(CliError::missing("n")),
        (None, None, _) => return Err(CliError::missing("input")),
    };
    let mut strategy = StrategyConfig::new(rule).with_randomization(false);
    if let Some(s) = args.sigma2 {
        strategy = strategy.with_sigma_sq(s);
    }
    strategy.validate()?;
    let grid = GridSpec::new(args.grid)?;
    let m_grid: Vec<f64> = (0..=grid.cells()).map(|i| grid.point(i)).collect();
    let diag = wealth_diagnostics(&strategy, &sample, args.delta, &m_grid, args.trace_m)?;

    let mut text = String::from("kind,x,wealth\n");
    for (m, w) in &diag.final_wealth {
        text.push_str(&format!("final,{m},{w}\n"));
    }
    for (t, w) in diag.trajectory.iter().enumerate() {
        text.push_str(&format!("trace,{},{w}\n", t + 1));
    }
    match args.out {
        Some(path) => {
            let mut w = create_output(&path)?;
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(write_err(&path))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(EXIT_UNWRITABLE, e.to_string())),
    }
}

fn cmd_plot(args: PlotArgs) -> CliResult<()> {
    let input = args.input.ok_or_else(|| CliError::missing("in"))?;
    let kind = args.kind.ok_or_else(|| CliError::missing("kind"))?;
    let out = args.out.ok_or_else(|| CliError::missing("out"))?;
    let file = File::open(&input).map_err(|e| {
        CliError::new(
            EXIT_MALFORMED,
            format!("cannot read {}: {e}", input.display()),
        )
    })?;
    let records = read_csv(BufReader::new(file))?;
    let svg = match kind.as_str() {
        "widths" => plot::widths_svg(&records)?,
        "ecdf" => {
            let n = args
                .n
                .ok_or_else(|| CliError::new(EXIT_ECDF_NEEDS_N, "ecdf plots need --n"))?;
            plot::ecdf_svg(&records, n)?
        }
        other => {
            return Err(CliError::new(
                EXIT_MALFORMED,
                format!("plot kind must be widths or ecdf, got `{other}`"),
            ))
        }
    };
    let mut w = create_output(&out)?;
    w.write_all(svg.as_bytes())
        .and_then(|_| w.flush())
        .map_err(write_err(&out))
}
