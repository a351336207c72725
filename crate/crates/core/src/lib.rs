//! Confidence intervals for the mean of a `[0, 1]`-bounded random variable
//! built by testing-by-betting.
//!
//! For every candidate mean `m` on a grid, a gambler bets on `X_t - m` with a
//! nonnegative stake. If the resulting wealth process reaches `1/δ`, the
//! candidate is rejected; the interval is what survives. The betting rules
//! range from the classical constant Hoeffding/Bernstein stakes to the
//! target-recalculating (STaR) rules that re-plan every round from the
//! remaining log-target and the number of rounds left.
//!
//! Module map:
//!
//! * [`process`]: wealth evolution, the rejection rule, last-round randomization.
//! * [`strategy`]: the six bet-selection rules.
//! * [`interval`]: grid inversion of the tests into one- and two-sided intervals.
//! * [`baselines`]: closed-form and binomial baselines (Hoeffding, empirical
//!   Bernstein, t-test, Clopper-Pearson and its randomized version).
//! * [`bench`]: the seeded Monte Carlo harness.

pub mod baselines;
pub mod bench;
mod error;
pub mod interval;
pub mod method;
pub mod process;
pub mod rng;
mod sample;
pub mod special;
pub mod strategy;

pub use error::{Error, Result};
pub use sample::Sample;
