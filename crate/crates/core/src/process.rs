//! Wealth processes for testing `H0(m)` by betting.
//!
//! All wealth is tracked as natural log; bankruptcy is `-inf` and is
//! absorbing. A process targeted at `m` is rejected once its wealth reaches
//! `1/δ`, i.e. `log_wealth >= ln(1/δ)`.

use crate::error::{check_delta, Error, Result};
use crate::Sample;

/// Cumulant bound subtracted by a compensated exponential process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Compensator {
    /// `ψ(ℓ) = ℓ²/8`.
    Hoeffding,
    /// `ψ(ℓ) = σ²ℓ²`.
    Bernstein { sigma_sq: f64 },
}

impl Compensator {
    #[inline]
    pub fn psi(self, ell: f64) -> f64 {
        match self {
            Compensator::Hoeffding => ell * ell / 8.0,
            Compensator::Bernstein { sigma_sq } => sigma_sq * ell * ell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessKind {
    /// `W_t = W_{t-1} (1 + ℓ (X_t - m))`, `ℓ ∈ [0, 1]`.
    Linear,
    /// `W_t = W_{t-1} exp(ℓ (X_t - m) - ψ(ℓ))`.
    ExpCompensated(Compensator),
}

impl ProcessKind {
    fn name(self) -> &'static str {
        match self {
            ProcessKind::Linear => "linear",
            ProcessKind::ExpCompensated(_) => "compensated exponential",
        }
    }
}

/// A bet for one round together with the process it feeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetDecision {
    pub ell: f64,
    pub kind: ProcessKind,
}

/// Running state of one test of `H0(m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetState {
    /// Hypothesized mean.
    pub m: f64,
    /// Current round, 1-based. Equals `n + 1` once the horizon is exhausted.
    pub t: usize,
    /// Horizon.
    pub n: usize,
    pub log_wealth: f64,
    /// `Σ_{i<t} (X_i - m)²`.
    pub v_sum: f64,
    pub rejected: bool,
    /// One-sided failure probability.
    pub delta: f64,
}

impl BetState {
    pub fn new(m: f64, n: usize, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::InvalidMean(m));
        }
        check_delta(delta)?;
        if n == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            m,
            t: 1,
            n,
            log_wealth: 0.0,
            v_sum: 0.0,
            rejected: false,
            delta,
        })
    }

    /// `ln(1/δ)`.
    #[inline]
    pub fn log_threshold(&self) -> f64 {
        -self.delta.ln()
    }

    /// `(ln(1/(W_t δ)))_+`, the log-wealth still missing to reject.
    #[inline]
    pub fn residual_target(&self) -> f64 {
        (self.log_threshold() - self.log_wealth).max(0.0)
    }

    /// `n - t + 1`, rounds left including the current one.
    #[inline]
    pub fn remaining(&self) -> usize {
        self.n + 1 - self.t
    }
}

/// Advances `state` by one round with stake `bet` on observation `x`.
pub fn step(state: BetState, kind: ProcessKind, bet: f64, x: f64) -> Result<BetState> {
    if state.t > state.n {
        return Err(Error::PastHorizon {
            t: state.t,
            n: state.n,
        });
    }
    let admissible = match kind {
        ProcessKind::Linear => (0.0..=1.0).contains(&bet),
        ProcessKind::ExpCompensated(_) => bet >= 0.0 && bet.is_finite(),
    };
    if !admissible {
        return Err(Error::InvalidBet {
            bet,
            kind: kind.name(),
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ObservationOutOfRange {
            index: state.t - 1,
            value: x,
        });
    }

    let diff = x - state.m;
    let increment = match kind {
        // ln_1p(-1) = -inf: bankruptcy
        ProcessKind::Linear => (bet * diff).ln_1p(),
        ProcessKind::ExpCompensated(psi) => bet * diff - psi.psi(bet),
    };
    let mut next = state;
    next.log_wealth += increment;
    next.v_sum += diff * diff;
    next.t += 1;
    next.rejected |= next.log_wealth >= state.log_threshold();
    Ok(next)
}

/// A bet-selection rule driving a test process.
pub trait BettingStrategy {
    /// The bet for round `state.t`, using only information available before
    /// observing `X_t`.
    fn decide(&self, state: &BetState) -> BetDecision;

    /// Whether rejection is latched at the first crossing of `1/δ`, after
    /// which the stake is forced to zero. When false, only the wealth after
    /// the last round is compared with the threshold.
    fn stops_at_target(&self) -> bool {
        true
    }
}

impl<S: BettingStrategy + ?Sized> BettingStrategy for &S {
    fn decide(&self, state: &BetState) -> BetDecision {
        (**self).decide(state)
    }

    fn stops_at_target(&self) -> bool {
        (**self).stops_at_target()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub rejected: bool,
    pub final_log_wealth: f64,
    /// Log-wealth after each round, length `n`, when requested.
    pub trajectory: Option<Vec<f64>>,
    /// Round at which rejection was established.
    pub stop_round: Option<usize>,
}

/// Runs the test of `H0(m)` over the whole sample.
pub fn run_test<S: BettingStrategy + ?Sized>(
    strategy: &S,
    sample: &Sample,
    m: f64,
    delta: f64,
) -> Result<TestOutcome> {
    drive(strategy, sample.values(), m, delta, false)
}

/// As [`run_test`], additionally recording the log-wealth trajectory.
pub fn run_test_traced<S: BettingStrategy + ?Sized>(
    strategy: &S,
    sample: &Sample,
    m: f64,
    delta: f64,
) -> Result<TestOutcome> {
    drive(strategy, sample.values(), m, delta, true)
}

pub(crate) fn drive<S: BettingStrategy + ?Sized>(
    strategy: &S,
    xs: &[f64],
    m: f64,
    delta: f64,
    trace: bool,
) -> Result<TestOutcome> {
    let mut state = BetState::new(m, xs.len(), delta)?;
    let latch = strategy.stops_at_target();
    let mut trajectory = trace.then(|| Vec::with_capacity(xs.len()));
    let mut stop_round = None;

    for &x in xs {
        let decision = strategy.decide(&state);
        state = step(state, decision.kind, decision.ell, x)?;
        if let Some(tr) = trajectory.as_mut() {
            tr.push(state.log_wealth);
        }
        if latch && state.rejected {
            // every further stake is zero, so the wealth is frozen
            stop_round = Some(state.t - 1);
            break;
        }
        if state.log_wealth == f64::NEG_INFINITY {
            break;
        }
    }
    if let Some(tr) = trajectory.as_mut() {
        tr.resize(xs.len(), state.log_wealth);
    }

    let rejected = if latch {
        state.rejected
    } else {
        state.log_wealth >= state.log_threshold()
    };
    if rejected && stop_round.is_none() {
        stop_round = Some(xs.len());
    }
    Ok(TestOutcome {
        rejected,
        final_log_wealth: state.log_wealth,
        trajectory,
        stop_round,
    })
}

/// All-or-nothing transform of the final wealth: returns `ln(1/δ)` if
/// `W ≥ u/δ` and `-inf` (wealth 0) otherwise. For `u` uniform on `[0, 1]`
/// the expected wealth is `min(W, 1/δ)`, so a test process stays one.
pub fn last_round_randomize(final_log_wealth: f64, delta: f64, u: f64) -> f64 {
    let log_threshold = -delta.ln();
    if final_log_wealth == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if final_log_wealth >= u.ln() + log_threshold {
        log_threshold
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(BetDecision);

    impl BettingStrategy for Constant {
        fn decide(&self, _: &BetState) -> BetDecision {
            self.0
        }
    }

    const HOEFFDING: ProcessKind = ProcessKind::ExpCompensated(Compensator::Hoeffding);

    #[test]
    fn linear_step_doubles_on_full_bet() {
        let s = BetState::new(0.0, 3, 0.05).unwrap();
        let s = step(s, ProcessKind::Linear, 1.0, 1.0).unwrap();
        assert!((s.log_wealth - 2f64.ln()).abs() < 1e-15);
        assert_eq!(s.t, 2);
        assert_eq!(s.v_sum, 1.0);
    }

    #[test]
    fn zero_bet_is_identity_on_wealth() {
        for &m in &[0.0, 0.3, 1.0] {
            for &x in &[0.0, 0.7, 1.0] {
                let s = BetState::new(m, 2, 0.1).unwrap();
                let lin = step(s, ProcessKind::Linear, 0.0, x).unwrap();
                let exp = step(s, HOEFFDING, 0.0, x).unwrap();
                assert_eq!(lin.log_wealth, 0.0);
                assert_eq!(exp.log_wealth, 0.0);
            }
        }
    }

    #[test]
    fn hoeffding_increment() {
        let s = BetState::new(0.5, 5, 0.05).unwrap();
        let s = step(s, HOEFFDING, 0.4, 1.0).unwrap();
        assert!((s.log_wealth - 0.18).abs() < 1e-15);
        let b = ProcessKind::ExpCompensated(Compensator::Bernstein { sigma_sq: 0.25 });
        let s = step(BetState::new(0.5, 5, 0.05).unwrap(), b, 0.4, 1.0).unwrap();
        assert!((s.log_wealth - (0.2 - 0.04)).abs() < 1e-15);
    }

    #[test]
    fn bankruptcy_is_absorbing_and_never_rejects() {
        let s = BetState::new(1.0, 3, 0.5).unwrap();
        let s = step(s, ProcessKind::Linear, 1.0, 0.0).unwrap();
        assert_eq!(s.log_wealth, f64::NEG_INFINITY);
        let s = step(s, ProcessKind::Linear, 1.0, 1.0).unwrap();
        assert_eq!(s.log_wealth, f64::NEG_INFINITY);
        assert!(!s.rejected);
    }

    #[test]
    fn step_contract_errors() {
        let s = BetState::new(0.5, 1, 0.05).unwrap();
        assert!(matches!(
            step(s, ProcessKind::Linear, 1.5, 0.5),
            Err(Error::InvalidBet { .. })
        ));
        assert!(matches!(
            step(s, ProcessKind::Linear, -0.1, 0.5),
            Err(Error::InvalidBet { .. })
        ));
        assert!(matches!(
            step(s, HOEFFDING, f64::INFINITY, 0.5),
            Err(Error::InvalidBet { .. })
        ));
        assert!(matches!(
            step(s, ProcessKind::Linear, 0.5, 1.2),
            Err(Error::ObservationOutOfRange { index: 0, .. })
        ));
        let done = step(s, ProcessKind::Linear, 0.5, 0.5).unwrap();
        assert!(matches!(
            step(done, ProcessKind::Linear, 0.5, 0.5),
            Err(Error::PastHorizon { .. })
        ));
        assert!(BetState::new(1.1, 1, 0.05).is_err());
        assert!(BetState::new(0.5, 1, 1.0).is_err());
        assert!(BetState::new(0.5, 1, 0.0).is_err());
    }

    #[test]
    fn rejection_latches() {
        let s = BetState::new(0.0, 3, 0.5).unwrap();
        let s = step(s, ProcessKind::Linear, 1.0, 1.0).unwrap();
        assert!(s.rejected);
        let s = step(s, ProcessKind::Linear, 1.0, 0.0).unwrap();
        assert!(s.rejected);
    }

    #[test]
    fn zero_strategy_never_rejects() {
        let zero = Constant(BetDecision {
            ell: 0.0,
            kind: ProcessKind::Linear,
        });
        let sample = Sample::new(vec![1.0; 50]).unwrap();
        let out = run_test(&zero, &sample, 0.0, 0.05).unwrap();
        assert!(!out.rejected);
        assert_eq!(out.final_log_wealth, 0.0);
        assert_eq!(out.stop_round, None);
    }

    #[test]
    fn latched_run_freezes_trajectory() {
        let all_in = Constant(BetDecision {
            ell: 1.0,
            kind: ProcessKind::Linear,
        });
        let sample = Sample::new(vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
        let out = run_test_traced(&all_in, &sample, 0.0, 0.2).unwrap();
        // ln 4 < ln 5 <= ln 8
        assert_eq!(out.stop_round, Some(3));
        let tr = out.trajectory.unwrap();
        assert_eq!(tr.len(), 6);
        assert!(tr[2..].iter().all(|&w| w == tr[2]));
        assert_eq!(out.final_log_wealth, 8f64.ln());
    }

    #[test]
    fn randomization_rule() {
        let delta: f64 = 0.05;
        let thr = -delta.ln();
        for &u in &[0.0, 0.3, 1.0] {
            assert_eq!(last_round_randomize(thr, delta, u), thr);
            assert_eq!(
                last_round_randomize(f64::NEG_INFINITY, delta, u),
                f64::NEG_INFINITY
            );
        }
        let half = (0.5 / delta).ln();
        assert_eq!(last_round_randomize(half, delta, 0.4), thr);
        assert_eq!(last_round_randomize(half, delta, 0.6), f64::NEG_INFINITY);
    }
}
