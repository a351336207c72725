//! Closed-form and binomial confidence intervals used as baselines.
//!
//! Each method has a one-sided lower bound at level `1 - delta_side`; the
//! two-sided versions spend `delta_total / 2` per side and obtain the upper
//! bound from the lower bound of the reflected data.

use crate::error::{check_delta, Error, Result};
use crate::special::{binomial_ln_pmf, binomial_sf_ge, bisect, student_t_quantile, ROOT_TOL};
use crate::Sample;

fn clip01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `X̄ - √(ln(1/δ) / 2n)`, clipped at 0.
pub fn hoeffding_lower(sample: &Sample, delta_side: f64) -> Result<f64> {
    check_delta(delta_side)?;
    let n = sample.len() as f64;
    Ok(clip01(
        sample.mean() - (-delta_side.ln() / (2.0 * n)).sqrt(),
    ))
}

pub fn hoeffding_ci(sample: &Sample, delta_total: f64) -> Result<(f64, f64)> {
    check_delta(delta_total)?;
    let half = delta_total / 2.0;
    Ok((
        hoeffding_lower(sample, half)?,
        1.0 - hoeffding_lower(&sample.reflect(), half)?,
    ))
}

/// Half-width of the one-sided empirical Bernstein bound (Maurer and Pontil):
/// `√(2 V̂ ln(2/δ) / n) + 7 ln(2/δ) / (3 (n - 1))`, with `V̂` the unbiased
/// sample variance.
pub fn empirical_bernstein_radius(sample: &Sample, delta_side: f64) -> Result<f64> {
    check_delta(delta_side)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let log_term = (2.0 / delta_side).ln();
    let nf = n as f64;
    Ok((2.0 * sample.variance() * log_term / nf).sqrt() + 7.0 * log_term / (3.0 * (nf - 1.0)))
}

pub fn empirical_bernstein_lower(sample: &Sample, delta_side: f64) -> Result<f64> {
    Ok(clip01(
        sample.mean() - empirical_bernstein_radius(sample, delta_side)?,
    ))
}

pub fn empirical_bernstein_ci(sample: &Sample, delta_total: f64) -> Result<(f64, f64)> {
    check_delta(delta_total)?;
    let r = empirical_bernstein_radius(sample, delta_total / 2.0)?;
    let mean = sample.mean();
    Ok((clip01(mean - r), clip01(mean + r)))
}

/// `t_{n-1, 1-δ} s / √n`; zero for a constant sample.
pub fn t_test_radius(sample: &Sample, delta_side: f64) -> Result<f64> {
    check_delta(delta_side)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let sd = sample.variance().sqrt();
    if sd == 0.0 {
        return Ok(0.0);
    }
    Ok(student_t_quantile(1.0 - delta_side, (n - 1) as f64) * sd / (n as f64).sqrt())
}

/// `X̄ - t_{n-1, 1-δ} s / √n`, clipped at 0. Not a guaranteed-coverage bound.
pub fn t_test_lower(sample: &Sample, delta_side: f64) -> Result<f64> {
    Ok(clip01(sample.mean() - t_test_radius(sample, delta_side)?))
}

pub fn t_test_ci(sample: &Sample, delta_total: f64) -> Result<(f64, f64)> {
    check_delta(delta_total)?;
    let r = t_test_radius(sample, delta_total / 2.0)?;
    let mean = sample.mean();
    Ok((clip01(mean - r), clip01(mean + r)))
}

/// `k` successes in `n` Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinomialSummary {
    pub k: u64,
    pub n: u64,
}

impl BinomialSummary {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if k > n {
            return Err(Error::Config(format!("{k} successes out of {n} trials")));
        }
        Ok(Self { k, n })
    }

    /// Counts the ones of a `{0, 1}`-valued sample.
    pub fn from_sample(sample: &Sample) -> Result<Self> {
        if let Some((index, &value)) = sample
            .values()
            .iter()
            .enumerate()
            .find(|(_, &x)| x != 0.0 && x != 1.0)
        {
            return Err(Error::NotBinary { index, value });
        }
        let k = sample.values().iter().filter(|&&x| x == 1.0).count() as u64;
        Self::new(k, sample.len() as u64)
    }

    pub fn flipped(self) -> Self {
        Self {
            k: self.n - self.k,
            n: self.n,
        }
    }
}

/// Solves `P(Bin(n, p) ≥ k) = δ` for `p`; 0 when `k = 0`.
pub fn clopper_pearson_lower(summary: BinomialSummary, delta_side: f64) -> Result<f64> {
    check_delta(delta_side)?;
    let BinomialSummary { k, n } = summary;
    if k == 0 {
        return Ok(0.0);
    }
    Ok(bisect(
        |p| binomial_sf_ge(k, n, p) >= delta_side,
        0.0,
        1.0,
        ROOT_TOL,
    ))
}

pub fn clopper_pearson(summary: BinomialSummary, delta_total: f64) -> Result<(f64, f64)> {
    check_delta(delta_total)?;
    let half = delta_total / 2.0;
    Ok((
        clopper_pearson_lower(summary, half)?,
        1.0 - clopper_pearson_lower(summary.flipped(), half)?,
    ))
}

/// Solves `P(Bin(n, p) > k) + u·P(Bin(n, p) = k) = δ` for `p`. The left
/// side increases in `p`; the bound is 0 if it already exceeds `δ` at
/// `p = 0` and 1 if it stays below `δ` at `p = 1`. `u = 1` recovers
/// [`clopper_pearson_lower`].
pub fn randomized_clopper_pearson_lower(
    summary: BinomialSummary,
    delta_side: f64,
    u: f64,
) -> Result<f64> {
    check_delta(delta_side)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Config(format!(
            "uniform draw must lie in [0, 1], got {u}"
        )));
    }
    let BinomialSummary { k, n } = summary;
    let p_value = |p: f64| binomial_sf_ge(k + 1, n, p) + u * binomial_ln_pmf(k, n, p).exp();
    if p_value(0.0) >= delta_side {
        return Ok(0.0);
    }
    if p_value(1.0) <= delta_side {
        return Ok(1.0);
    }
    Ok(bisect(|p| p_value(p) >= delta_side, 0.0, 1.0, ROOT_TOL))
}

pub fn randomized_clopper_pearson(
    summary: BinomialSummary,
    delta_total: f64,
    u_low: f64,
    u_high: f64,
) -> Result<(f64, f64)> {
    check_delta(delta_total)?;
    let half = delta_total / 2.0;
    Ok((
        randomized_clopper_pearson_lower(summary, half, u_low)?,
        1.0 - randomized_clopper_pearson_lower(summary.flipped(), half, u_high)?,
    ))
}
