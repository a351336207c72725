//! Bet-selection rules.
//!
//! | rule             | process                     | stake                                         |
//! |------------------|-----------------------------|-----------------------------------------------|
//! | `Hoeffding`      | exp, `ψ = ℓ²/8`             | `√(8 ln(1/δ) / n)`                            |
//! | `StarHoeffding`  | exp, `ψ = ℓ²/8`             | `√(8 r / (n-t+1))`                            |
//! | `Bernstein`      | exp, `ψ = σ²ℓ²`             | `√(ln(1/δ) / (n σ²))`                         |
//! | `StarBernstein`  | exp, `ψ = σ²ℓ²`             | `√(r / ((n-t+1) σ²))`                         |
//! | `Bets`           | linear                      | `√(2 ln(1/δ) / (n v)) ∧ 1`                    |
//! | `StarBets`       | linear                      | `√(2 r / ((n-t+1) v)) ∧ 1`                    |
//!
//! where `r = (ln(1/δ) - ln W_t)_+` is the residual log-target and `v` is a
//! clipped running estimate of `E[(X - m)²]`.

use crate::error::{Error, Result};
use crate::process::{BetDecision, BetState, BettingStrategy, Compensator, ProcessKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Hoeffding,
    StarHoeffding,
    Bernstein,
    StarBernstein,
    Bets,
    StarBets,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Hoeffding,
        Rule::StarHoeffding,
        Rule::Bernstein,
        Rule::StarBernstein,
        Rule::Bets,
        Rule::StarBets,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Hoeffding => "hoeffding",
            Rule::StarHoeffding => "star-hoeffding",
            Rule::Bernstein => "bernstein",
            Rule::StarBernstein => "star-bernstein",
            Rule::Bets => "bets",
            Rule::StarBets => "star-bets",
        }
    }

    pub fn needs_variance(self) -> bool {
        matches!(self, Rule::Bernstein | Rule::StarBernstein)
    }

    pub fn is_star(self) -> bool {
        matches!(
            self,
            Rule::StarHoeffding | Rule::StarBernstein | Rule::StarBets
        )
    }
}

/// Upper clip on the second-moment estimate of the linear rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipMode {
    /// Clip at 1.
    One,
    /// Clip at `m(1 - m)`, the largest `E[(X - m)²]` when `m` is the mean.
    MOneMinusM,
}

/// Additive correction of the running second-moment estimate at round `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentEstimator {
    /// `c·m·n / (t-1)²`.
    MeanScaled { c: f64 },
    /// `10·ln(8/α)·n / (t-1)²`.
    Confidence { alpha: f64 },
}

impl MomentEstimator {
    fn correction(self, m: f64, n: f64, t_minus_1: f64) -> f64 {
        let scale = match self {
            MomentEstimator::MeanScaled { c } => c * m,
            MomentEstimator::Confidence { alpha } => 10.0 * (8.0 / alpha).ln(),
        };
        scale * n / (t_minus_1 * t_minus_1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub rule: Rule,
    /// Known variance; required by the Bernstein rules.
    pub sigma_sq: Option<f64>,
    pub estimator: MomentEstimator,
    pub clip_mode: ClipMode,
    /// Apply [`last_round_randomize`](crate::process::last_round_randomize)
    /// when building intervals.
    pub randomize_last: bool,
    /// Latch rejection at the first threshold crossing and stop betting.
    pub early_stop: bool,
}

impl StrategyConfig {
    /// Defaults: `c = 1`, clip at `m(1-m)`, randomized last round. The
    /// constant-stake Hoeffding and Bernstein rules compare only the final
    /// wealth with the threshold; every other rule stops at the first crossing.
    pub fn new(rule: Rule) -> Self {
        Self {
            rule,
            sigma_sq: None,
            estimator: MomentEstimator::MeanScaled { c: 1.0 },
            clip_mode: ClipMode::MOneMinusM,
            randomize_last: true,
            early_stop: !matches!(rule, Rule::Hoeffding | Rule::Bernstein),
        }
    }

    pub fn with_sigma_sq(mut self, sigma_sq: f64) -> Self {
        self.sigma_sq = Some(sigma_sq);
        self
    }

    pub fn with_randomization(mut self, randomize_last: bool) -> Self {
        self.randomize_last = randomize_last;
        self
    }

    pub fn with_estimator(mut self, estimator: MomentEstimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn with_clip(mut self, clip_mode: ClipMode) -> Self {
        self.clip_mode = clip_mode;
        self
    }

    pub fn with_early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }

    /// The literal linear-rule pseudocode: clip at 1, confidence-based correction.
    pub fn literal_bets(rule: Rule, alpha: f64) -> Self {
        Self::new(rule)
            .with_clip(ClipMode::One)
            .with_estimator(MomentEstimator::Confidence { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        if self.rule.needs_variance() {
            match self.sigma_sq {
                Some(s) if s > 0.0 && s <= 0.25 => {}
                Some(s) => {
                    return Err(Error::Config(format!(
                        "sigma_sq must lie in (0, 1/4] for {}, got {s}",
                        self.rule.id()
                    )))
                }
                None => {
                    return Err(Error::Config(format!(
                        "{} requires sigma_sq",
                        self.rule.id()
                    )))
                }
            }
        }
        match self.estimator {
            MomentEstimator::MeanScaled { c } if !(c > 0.0 && c.is_finite()) => Err(Error::Config(
                format!("estimator constant must be positive, got {c}"),
            )),
            MomentEstimator::Confidence { alpha } if !(alpha > 0.0 && alpha < 1.0) => Err(
                Error::Config(format!("alpha must lie in (0, 1), got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    fn bernstein_kind(&self) -> (f64, ProcessKind) {
        let sigma_sq = self
            .sigma_sq
            .expect("Bernstein rules need sigma_sq; call validate() first");
        (
            sigma_sq,
            ProcessKind::ExpCompensated(Compensator::Bernstein { sigma_sq }),
        )
    }
}

impl BettingStrategy for StrategyConfig {
    fn decide(&self, state: &BetState) -> BetDecision {
        match self.rule {
            Rule::Hoeffding => hoeffding_bet(self, state),
            Rule::StarHoeffding => star_hoeffding_bet(self, state),
            Rule::Bernstein => bernstein_bet(self, state),
            Rule::StarBernstein => star_bernstein_bet(self, state),
            Rule::Bets => bets_bet(self, state),
            Rule::StarBets => star_bets_bet(self, state),
        }
    }

    fn stops_at_target(&self) -> bool {
        self.early_stop
    }
}

const HOEFFDING_KIND: ProcessKind = ProcessKind::ExpCompensated(Compensator::Hoeffding);

pub fn hoeffding_bet(_config: &StrategyConfig, state: &BetState) -> BetDecision {
    let ell = (8.0 * state.log_threshold().max(0.0) / state.n as f64).sqrt();
    BetDecision {
        ell,
        kind: HOEFFDING_KIND,
    }
}

pub fn star_hoeffding_bet(_config: &StrategyConfig, state: &BetState) -> BetDecision {
    let ell = (8.0 * state.residual_target() / state.remaining() as f64).sqrt();
    BetDecision {
        ell,
        kind: HOEFFDING_KIND,
    }
}

pub fn bernstein_bet(config: &StrategyConfig, state: &BetState) -> BetDecision {
    let (sigma_sq, kind) = config.bernstein_kind();
    let ell = (state.log_threshold().max(0.0) / (state.n as f64 * sigma_sq)).sqrt();
    BetDecision { ell, kind }
}

pub fn star_bernstein_bet(config: &StrategyConfig, state: &BetState) -> BetDecision {
    let (sigma_sq, kind) = config.bernstein_kind();
    let ell = (state.residual_target() / (state.remaining() as f64 * sigma_sq)).sqrt();
    BetDecision { ell, kind }
}

/// Clipped running estimate of `E[(X - m)²]` used by the linear rules. At
/// `t = 1` the correction term is infinite, so the estimate is the clip.
pub fn second_moment_estimate(config: &StrategyConfig, state: &BetState) -> f64 {
    let clip = match config.clip_mode {
        ClipMode::One => 1.0,
        ClipMode::MOneMinusM => state.m * (1.0 - state.m),
    };
    if state.t <= 1 {
        return clip;
    }
    let seen = (state.t - 1) as f64;
    let estimate = state.v_sum / seen + config.estimator.correction(state.m, state.n as f64, seen);
    estimate.min(clip)
}

/// `√(2 target / (rounds · v)) ∧ 1`, with `v = 0` read as an unbounded stake.
fn linear_stake(target: f64, rounds: f64, v: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    if v <= 0.0 {
        return 1.0;
    }
    (2.0 * target / (rounds * v)).sqrt().min(1.0)
}

pub fn bets_bet(config: &StrategyConfig, state: &BetState) -> BetDecision {
    let v = second_moment_estimate(config, state);
    let ell = linear_stake(state.log_threshold(), state.n as f64, v);
    BetDecision {
        ell,
        kind: ProcessKind::Linear,
    }
}

pub fn star_bets_bet(config: &StrategyConfig, state: &BetState) -> BetDecision {
    let v = second_moment_estimate(config, state);
    let ell = linear_stake(state.residual_target(), state.remaining() as f64, v);
    BetDecision {
        ell,
        kind: ProcessKind::Linear,
    }
}
