//! Seeded Monte Carlo harness: coverage and width experiments, eCDFs of
//! lower bounds, wealth diagnostics, and the CSV record format.
//!
//! Every repetition draws from its own stream, derived from the experiment
//! seed by `(role, n, rep)`; method randomization derives from
//! `(method, n, rep)`. Records are therefore independent of thread count
//! and scheduling order.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::baselines::{clopper_pearson, BinomialSummary};
use crate::error::{check_delta, Error, Result};
use crate::interval::GridSpec;
use crate::method::{evaluate, Method, MethodSettings, Side};
use crate::process::{drive, BettingStrategy};
use crate::rng::{CounterRng, Stream};
use crate::Sample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Bernoulli { p: f64 },
    Beta { a: f64, b: f64 },
    PointMass { x: f64 },
}

impl DistributionSpec {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "Bernoulli p must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self::Bernoulli { p })
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Config(format!(
                "Beta parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(Self::Beta { a, b })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Config(format!(
                "point mass must lie in [0, 1], got {x}"
            )));
        }
        Ok(Self::PointMass { x })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { p } => p,
            Self::Beta { a, b } => a / (a + b),
            Self::PointMass { x } => x,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::Beta { a, b } => a * b / ((a + b) * (a + b) * (a + b + 1.0)),
            Self::PointMass { .. } => 0.0,
        }
    }

    /// `n` i.i.d. draws. Beta draws use `rand_distr`'s Beta sampler.
    pub fn sample(&self, n: usize, rng: &mut CounterRng) -> Sample {
        let values: Vec<f64> = match *self {
            Self::Bernoulli { p } => (0..n)
                .map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
                .collect(),
            Self::Beta { a, b } => {
                let beta = Beta::new(a, b).expect("parameters validated at construction");
                (0..n).map(|_| beta.sample(rng).clamp(0.0, 1.0)).collect()
            }
            Self::PointMass { x } => vec![x; n],
        };
        Sample::new(values).expect("draws lie in [0, 1] and n > 0")
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            Self::Beta { a, b } => write!(f, "beta:{a}:{b}"),
            Self::PointMass { x } => write!(f, "point:{x}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// `bernoulli:P`, `beta:A:B` or `point:X`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{t}` in distribution `{s}`")))
        };
        match parts.as_slice() {
            ["bernoulli", p] => Self::bernoulli(num(p)?),
            ["beta", a, b] => Self::beta(num(a)?, num(b)?),
            ["point", x] => Self::point_mass(num(x)?),
            _ => Err(Error::Config(format!(
                "distribution must be bernoulli:P, beta:A:B or point:X, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    TwoSided,
    /// Lower bounds only, spending the whole `δ` on them.
    LowerOnly,
}

impl Mode {
    fn side(self) -> Side {
        match self {
            Mode::TwoSided => Side::Two,
            Mode::LowerOnly => Side::Lower,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" => Ok(Mode::TwoSided),
            "lower" => Ok(Mode::LowerOnly),
            other => Err(Error::Config(format!(
                "mode must be two or lower, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub n_list: Vec<usize>,
    pub delta: f64,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Draw one master sample per `n` and only permute it per repetition.
    pub shuffle_only: bool,
    pub grid: GridSpec,
    pub randomize: bool,
}

impl ExperimentConfig {
    pub fn new(distribution: DistributionSpec, n_list: Vec<usize>, methods: Vec<Method>) -> Self {
        Self {
            distribution,
            n_list,
            delta: 0.05,
            methods,
            reps: 1000,
            seed: 0,
            mode: Mode::TwoSided,
            shuffle_only: false,
            grid: GridSpec::default(),
            randomize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::Config(
                "n list must be nonempty with positive sizes".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        Ok(())
    }
}

/// One repetition of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: String,
    pub dist: String,
    pub n: usize,
    pub delta: f64,
    pub rep: usize,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    /// `None` in shuffle mode, where coverage is meaningless.
    pub covered: Option<bool>,
    pub seed: u64,
}

const ROLE_SAMPLE: &str = "sample";
const ROLE_MASTER: &str = "master";
const ROLE_SHUFFLE: &str = "shuffle";

fn rep_stream(root: Stream, role: &str, n: usize, rep: usize) -> Stream {
    root.child_str(role).child(n as u64).child(rep as u64)
}

/// Runs every `(method, n, rep)` cell. Output order is by method, then `n`,
/// then repetition, as listed in the config.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let root = Stream::new(cfg.seed);
    let mean = cfg.distribution.mean();
    let dist_label = cfg.distribution.to_string();
    let settings = MethodSettings {
        grid: cfg.grid,
        sigma_sq: Some(cfg.distribution.variance()),
        randomize: cfg.randomize,
    };
    let side = cfg.mode.side();

    let masters: Vec<Sample> = if cfg.shuffle_only {
        cfg.n_list
            .iter()
            .map(|&n| {
                cfg.distribution
                    .sample(n, &mut rep_stream(root, ROLE_MASTER, n, 0).rng())
            })
            .collect()
    } else {
        Vec::new()
    };

    let jobs: Vec<(usize, usize)> = (0..cfg.n_list.len())
        .flat_map(|ni| (0..cfg.reps).map(move |rep| (ni, rep)))
        .collect();

    let per_job: Vec<Vec<(usize, BenchRecord)>> = jobs
        .par_iter()
        .map(|&(ni, rep)| {
            let n = cfg.n_list[ni];
            let sample = if cfg.shuffle_only {
                let mut values = masters[ni].values().to_vec();
                values.shuffle(&mut rep_stream(root, ROLE_SHUFFLE, n, rep).rng());
                Sample::new(values).expect("permutation of a valid sample")
            } else {
                cfg.distribution
                    .sample(n, &mut rep_stream(root, ROLE_SAMPLE, n, rep).rng())
            };
            cfg.methods
                .iter()
                .enumerate()
                .map(|(mi, &method)| {
                    let seed = rep_stream(root, method.id(), n, rep).key();
                    let (lower, upper) =
                        evaluate(method, &sample, cfg.delta, side, &settings, seed)?;
                    let covered = (!cfg.shuffle_only).then_some(match cfg.mode {
                        Mode::TwoSided => lower <= mean && mean <= upper,
                        Mode::LowerOnly => lower <= mean,
                    });
                    let record = BenchRecord {
                        method: method.id().to_string(),
                        dist: dist_label.clone(),
                        n,
                        delta: cfg.delta,
                        rep,
                        lower,
                        upper,
                        width: upper - lower,
                        covered,
                        seed,
                    };
                    Ok(((mi * cfg.n_list.len() + ni) * cfg.reps + rep, record))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut keyed: Vec<(usize, BenchRecord)> = per_job.into_iter().flatten().collect();
    keyed.sort_unstable_by_key(|(key, _)| *key);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

/// Aggregate of one `(method, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: String,
    pub n: usize,
    pub reps: usize,
    pub mean_width: f64,
    /// Mean of `true_mean - lower`.
    pub mean_lower_distance: f64,
    pub coverage: Option<f64>,
    /// 95% Clopper-Pearson interval on the coverage probability.
    pub coverage_ci: Option<(f64, f64)>,
    /// Repetitions that produced a single-point interval.
    pub zero_width: usize,
}

pub fn summarize(records: &[BenchRecord], true_mean: f64) -> Vec<CellSummary> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in records {
        let key = (r.method.clone(), r.n);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(method, n)| {
            let cell: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.method == method && r.n == n)
                .collect();
            let reps = cell.len();
            let mean_of = |f: &dyn Fn(&BenchRecord) -> f64| {
                cell.iter().map(|r| f(r)).sum::<f64>() / reps as f64
            };
            let covered: Option<Vec<bool>> = cell.iter().map(|r| r.covered).collect();
            let (coverage, coverage_ci) = match covered {
                Some(flags) => {
                    let k = flags.iter().filter(|&&c| c).count() as u64;
                    let ci = BinomialSummary::new(k, reps as u64)
                        .and_then(|s| clopper_pearson(s, 0.05))
                        .ok();
                    (Some(k as f64 / reps as f64), ci)
                }
                None => (None, None),
            };
            CellSummary {
                mean_width: mean_of(&|r| r.width),
                mean_lower_distance: mean_of(&|r| true_mean - r.lower),
                coverage,
                coverage_ci,
                zero_width: cell.iter().filter(|r| r.width == 0.0).count(),
                method,
                n,
                reps,
            }
        })
        .collect()
}

/// Empirical CDF of the lower bounds of one `(method, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    pub method: String,
    pub n: usize,
    /// Distinct lower bounds `x` with the fraction of bounds `<= x`.
    pub points: Vec<(f64, f64)>,
    /// Mean of the generating distribution, when its label parses.
    pub true_mean: Option<f64>,
    /// Target coverage `1 - δ`.
    pub target: f64,
}

impl Ecdf {
    /// Fraction of lower bounds `<= x`.
    pub fn at(&self, x: f64) -> f64 {
        self.points
            .iter()
            .take_while(|(v, _)| *v <= x)
            .last()
            .map_or(0.0, |&(_, y)| y)
    }
}

pub fn ecdf(records: &[BenchRecord], method: &str, n: usize) -> Result<Ecdf> {
    let cell: Vec<&BenchRecord> = records
        .iter()
        .filter(|r| r.method == method && r.n == n)
        .collect();
    if cell.is_empty() {
        return Err(Error::Config(format!(
            "no records for method {method} at n = {n}"
        )));
    }
    let mut lowers: Vec<f64> = cell.iter().map(|r| r.lower).collect();
    lowers.sort_by(f64::total_cmp);
    let total = lowers.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in lowers.iter().enumerate() {
        let y = (i + 1) as f64 / total;
        match points.last_mut() {
            Some(last) if last.0 == x => last.1 = y,
            _ => points.push((x, y)),
        }
    }
    Ok(Ecdf {
        method: method.to_string(),
        n,
        points,
        true_mean: cell[0]
            .dist
            .parse::<DistributionSpec>()
            .ok()
            .map(|d| d.mean()),
        target: 1.0 - cell[0].delta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthDiagnostics {
    /// `(m, W_n)` for every requested candidate, without randomization.
    pub final_wealth: Vec<(f64, f64)>,
    pub trace_m: f64,
    /// `W_1, …, W_n` at `trace_m`.
    pub trajectory: Vec<f64>,
}

pub fn wealth_diagnostics<S: BettingStrategy + ?Sized>(
    strategy: &S,
    sample: &Sample,
    delta: f64,
    m_grid: &[f64],
    trace_m: f64,
) -> Result<WealthDiagnostics> {
    let final_wealth = m_grid
        .iter()
        .map(|&m| {
            Ok((
                m,
                drive(strategy, sample.values(), m, delta, false)?
                    .final_log_wealth
                    .exp(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let traced = drive(strategy, sample.values(), trace_m, delta, true)?;
    Ok(WealthDiagnostics {
        final_wealth,
        trace_m,
        trajectory: traced
            .trajectory
            .expect("tracing requested")
            .into_iter()
            .map(f64::exp)
            .collect(),
    })
}

pub const CSV_HEADER: &str = "method,dist,n,delta,rep,lower,upper,width,covered,seed";

/// Writes records with shortest round-trip float formatting.
pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let covered = match r.covered {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method, r.dist, r.n, r.delta, r.rep, r.lower, r.upper, r.width, covered, r.seed
        )?;
    }
    out.flush()
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<BenchRecord>> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == CSV_HEADER => {}
        Some((_, Ok(h))) => return Err(parse_err(1, format!("unexpected header `{h}`"))),
        Some((_, Err(e))) => return Err(parse_err(1, e.to_string())),
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(parse_err(
                line_no,
                format!("expected 10 fields, got {}", fields.len()),
            ));
        }
        fn num<T: FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {name} `{s}`"),
            })
        }
        let covered = match fields[8] {
            "true" => Some(true),
            "false" => Some(false),
            "" => None,
            other => return Err(parse_err(line_no, format!("bad covered flag `{other}`"))),
        };
        records.push(BenchRecord {
            method: fields[0].to_string(),
            dist: fields[1].to_string(),
            n: num(fields[2], "n", line_no)?,
            delta: num(fields[3], "delta", line_no)?,
            rep: num(fields[4], "rep", line_no)?,
            lower: num(fields[5], "lower", line_no)?,
            upper: num(fields[6], "upper", line_no)?,
            width: num(fields[7], "width", line_no)?,
            covered,
            seed: num(fields[9], "seed", line_no)?,
        });
    }
    if records.is_empty() {
        return Err(parse_err(2, "no records".into()));
    }
    Ok(records)
}
