//! Inverting betting tests into confidence intervals on a grid.
//!
//! The lower bound scans `m_i = i/g` upward and stops at the first candidate
//! that is not rejected; the bound is the last rejected point of that prefix.
//! Every rule stakes `ℓ ≥ 0`, so the test aimed at `m_i` is a supermartingale
//! whenever the true mean is at most `m_i`, and a rejection at `m_i` is a
//! valid rejection of every mean below it. The upper bound is the lower
//! bound of the reflected sample `1 - X`, mirrored back.

use crate::error::{check_delta, Error, Result};
use crate::process::{drive, last_round_randomize};
use crate::rng::Stream;
use crate::strategy::StrategyConfig;
use crate::Sample;

pub const DEFAULT_GRID_CELLS: usize = 1000;

/// Grid of candidate means `i/g`, `i = 0..=g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    cells: usize,
}

impl GridSpec {
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 cells, got {cells}"
            )));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.cells as f64
    }

    /// Largest grid index whose point is `<= x`, or `None` when `x < 0`.
    pub fn floor_index(&self, x: f64) -> Option<usize> {
        if x < 0.0 {
            return None;
        }
        let mut i = ((x * self.cells as f64).floor() as usize).min(self.cells);
        // guard against rounding in the product
        while i > 0 && self.point(i) > x {
            i -= 1;
        }
        while i < self.cells && self.point(i + 1) <= x {
            i += 1;
        }
        Some(i)
    }

    pub fn nearest(&self, x: f64) -> f64 {
        self.point(((x * self.cells as f64).round() as usize).min(self.cells))
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            cells: DEFAULT_GRID_CELLS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Index of the last grid point of the rejected prefix.
    pub frontier: Option<usize>,
}

/// One-sided lower confidence bound at level `1 - delta_side`.
///
/// With last-round randomization on, every grid point is randomized with the
/// same uniform, drawn from the stream keyed by `seed`. Each candidate's test
/// keeps its level, and the rejected set stays a prefix whenever the final
/// wealth decreases in `m`.
pub fn lower_confidence_bound(
    strategy: &StrategyConfig,
    sample: &Sample,
    delta_side: f64,
    grid: GridSpec,
    seed: u64,
) -> Result<LowerBound> {
    strategy.validate()?;
    check_delta(delta_side)?;
    // one uniform shared by every grid point of this side
    let u = Stream::new(seed).unit_open_at(0);
    let log_threshold = -delta_side.ln();
    let xs = sample.values();

    let mut frontier = None;
    for i in 0..=grid.cells() {
        let outcome = drive(strategy, xs, grid.point(i), delta_side, false)?;
        let rejected = if strategy.randomize_last {
            last_round_randomize(outcome.final_log_wealth, delta_side, u) >= log_threshold
        } else {
            outcome.rejected
        };
        if !rejected {
            break;
        }
        frontier = Some(i);
    }
    Ok(LowerBound {
        value: frontier.map_or(0.0, |i| grid.point(i)),
        frontier,
    })
}

/// One-sided upper confidence bound: the mirrored lower bound of `1 - X`.
pub fn upper_confidence_bound(
    strategy: &StrategyConfig,
    sample: &Sample,
    delta_side: f64,
    grid: GridSpec,
    seed: u64,
) -> Result<LowerBound> {
    let reflected = lower_confidence_bound(strategy, &sample.reflect(), delta_side, grid, seed)?;
    let frontier = reflected.frontier.map(|j| grid.cells() - j);
    Ok(LowerBound {
        value: frontier.map_or(1.0, |i| grid.point(i)),
        frontier,
    })
}

/// Seeds of the lower and upper sides of a two-sided interval.
pub fn side_seeds(seed: u64) -> (u64, u64) {
    let root = Stream::new(seed);
    (root.child_str("lower").key(), root.child_str("upper").key())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalResult {
    pub lower: f64,
    pub upper: f64,
    pub delta_total: f64,
    pub grid_cells: usize,
    pub frontier_lower: Option<usize>,
    pub frontier_upper: Option<usize>,
    pub method: String,
    pub seed: u64,
    /// The two one-sided bounds crossed, so every grid point was rejected
    /// by one side; the interval was collapsed to a single grid point.
    pub degenerate: bool,
}

impl IntervalResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, mean: f64) -> bool {
        self.lower <= mean && mean <= self.upper
    }
}

/// Two-sided interval spending `delta_total / 2` on each side.
pub fn confidence_interval(
    strategy: &StrategyConfig,
    sample: &Sample,
    delta_total: f64,
    grid: GridSpec,
    seed: u64,
) -> Result<IntervalResult> {
    check_delta(delta_total)?;
    let delta_side = delta_total / 2.0;
    let (seed_lower, seed_upper) = side_seeds(seed);
    let (lower, upper) = rayon::join(
        || lower_confidence_bound(strategy, sample, delta_side, grid, seed_lower),
        || upper_confidence_bound(strategy, sample, delta_side, grid, seed_upper),
    );
    let (lower, upper) = (lower?, upper?);

    let mut result = IntervalResult {
        lower: lower.value,
        upper: upper.value,
        delta_total,
        grid_cells: grid.cells(),
        frontier_lower: lower.frontier,
        frontier_upper: upper.frontier,
        method: strategy.rule.id().to_string(),
        seed,
        degenerate: false,
    };
    if result.lower > result.upper {
        let point = grid.nearest(0.5 * (result.lower + result.upper));
        result.lower = point;
        result.upper = point;
        result.degenerate = true;
    }
    Ok(result)
}
