//! Uniform front end over every interval method: the betting rules and the
//! closed-form baselines.

use std::fmt;
use std::str::FromStr;

use crate::baselines::{
    clopper_pearson, clopper_pearson_lower, empirical_bernstein_ci, empirical_bernstein_lower,
    hoeffding_ci, hoeffding_lower, randomized_clopper_pearson, randomized_clopper_pearson_lower,
    t_test_ci, t_test_lower, BinomialSummary,
};
use crate::error::{check_delta, Error, Result};
use crate::interval::{
    confidence_interval, lower_confidence_bound, upper_confidence_bound, GridSpec,
};
use crate::rng::Stream;
use crate::strategy::{Rule, StrategyConfig};
use crate::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Betting(Rule),
    HoeffdingClosed,
    EmpiricalBernstein,
    TTest,
    ClopperPearson,
    RandomizedClopperPearson,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::Betting(Rule::StarBets),
        Method::Betting(Rule::Bets),
        Method::Betting(Rule::Hoeffding),
        Method::Betting(Rule::StarHoeffding),
        Method::Betting(Rule::Bernstein),
        Method::Betting(Rule::StarBernstein),
        Method::HoeffdingClosed,
        Method::EmpiricalBernstein,
        Method::TTest,
        Method::ClopperPearson,
        Method::RandomizedClopperPearson,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Betting(rule) => rule.id(),
            Method::HoeffdingClosed => "hoeffding-closed",
            Method::EmpiricalBernstein => "emp-bernstein",
            Method::TTest => "t-test",
            Method::ClopperPearson => "cp",
            Method::RandomizedClopperPearson => "cp-rand",
        }
    }

    /// Every method except the t-test has coverage at least `1 - δ`.
    pub fn guarantees_coverage(self) -> bool {
        self != Method::TTest
    }

    pub fn binary_only(self) -> bool {
        matches!(
            self,
            Method::ClopperPearson | Method::RandomizedClopperPearson
        )
    }

    pub fn needs_variance(self) -> bool {
        matches!(self, Method::Betting(rule) if rule.needs_variance())
    }

    pub fn available() -> String {
        Self::ALL
            .iter()
            .map(|m| m.id())
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn parse_list(list: &str) -> Result<Vec<Method>> {
        list.split(',').map(|s| s.trim().parse()).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMethod {
                name: s.to_string(),
                available: Self::available(),
            })
    }
}

/// Which bounds to compute. One-sided runs spend the whole `δ` on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Two,
    Lower,
    Upper,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" => Ok(Side::Two),
            "lower" => Ok(Side::Lower),
            "upper" => Ok(Side::Upper),
            other => Err(Error::Config(format!(
                "side must be two, lower or upper, got `{other}`"
            ))),
        }
    }
}

/// Settings shared by every method call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSettings {
    pub grid: GridSpec,
    /// Known variance for the Bernstein rules.
    pub sigma_sq: Option<f64>,
    /// Last-round randomization for the betting rules.
    pub randomize: bool,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            sigma_sq: None,
            randomize: true,
        }
    }
}

impl MethodSettings {
    pub fn strategy(&self, rule: Rule) -> StrategyConfig {
        let mut cfg = StrategyConfig::new(rule).with_randomization(self.randomize);
        if let Some(s) = self.sigma_sq {
            cfg = cfg.with_sigma_sq(s);
        }
        cfg
    }
}

/// Computes `(lower, upper)` for `method`. One-sided requests return the
/// trivial bound (0 or 1) on the other side.
pub fn evaluate(
    method: Method,
    sample: &Sample,
    delta: f64,
    side: Side,
    settings: &MethodSettings,
    seed: u64,
) -> Result<(f64, f64)> {
    check_delta(delta)?;
    match method {
        Method::Betting(rule) => {
            let cfg = settings.strategy(rule);
            let grid = settings.grid;
            match side {
                Side::Two => {
                    let ci = confidence_interval(&cfg, sample, delta, grid, seed)?;
                    Ok((ci.lower, ci.upper))
                }
                Side::Lower => Ok((
                    lower_confidence_bound(&cfg, sample, delta, grid, seed)?.value,
                    1.0,
                )),
                Side::Upper => Ok((
                    0.0,
                    upper_confidence_bound(&cfg, sample, delta, grid, seed)?.value,
                )),
            }
        }
        Method::HoeffdingClosed => closed_form(sample, delta, side, hoeffding_ci, hoeffding_lower),
        Method::EmpiricalBernstein => closed_form(
            sample,
            delta,
            side,
            empirical_bernstein_ci,
            empirical_bernstein_lower,
        ),
        Method::TTest => closed_form(sample, delta, side, t_test_ci, t_test_lower),
        Method::ClopperPearson => {
            let summary = BinomialSummary::from_sample(sample)?;
            match side {
                Side::Two => clopper_pearson(summary, delta),
                Side::Lower => Ok((clopper_pearson_lower(summary, delta)?, 1.0)),
                Side::Upper => Ok((0.0, 1.0 - clopper_pearson_lower(summary.flipped(), delta)?)),
            }
        }
        Method::RandomizedClopperPearson => {
            let summary = BinomialSummary::from_sample(sample)?;
            let stream = Stream::new(seed);
            let (u_low, u_high) = (stream.unit_open_at(0), stream.unit_open_at(1));
            match side {
                Side::Two => randomized_clopper_pearson(summary, delta, u_low, u_high),
                Side::Lower => Ok((
                    randomized_clopper_pearson_lower(summary, delta, u_low)?,
                    1.0,
                )),
                Side::Upper => Ok((
                    0.0,
                    1.0 - randomized_clopper_pearson_lower(summary.flipped(), delta, u_high)?,
                )),
            }
        }
    }
}

fn closed_form(
    sample: &Sample,
    delta: f64,
    side: Side,
    two_sided: fn(&Sample, f64) -> Result<(f64, f64)>,
    lower: fn(&Sample, f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    match side {
        Side::Two => two_sided(sample, delta),
        Side::Lower => Ok((lower(sample, delta)?, 1.0)),
        Side::Upper => Ok((0.0, 1.0 - lower(&sample.reflect(), delta)?)),
    }
}
