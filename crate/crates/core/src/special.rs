//! Special functions and monotone root finding used by the baselines.
//!
//! * `ln_gamma`: Lanczos approximation (g = 7, nine coefficients).
//! * `reg_inc_beta`: continued fraction evaluated with the modified Lentz
//!   method, switching to the complementary form past the mean of the
//!   continued fraction's convergence region.
//! * Binomial tails: log-space summation of the probability mass function.
//! * Quantiles: bisection on the CDF.

use std::f64::consts::PI;

/// Absolute tolerance used for every root found by bisection.
pub const ROOT_TOL: f64 = 1e-10;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` where the caller supplies both
/// `x` and `y = 1 - x`, so that values of `x` close to 1 keep full precision.
pub fn reg_inc_beta_xy(a: f64, b: f64, x: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * y.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, y) / b
    }
}

pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    reg_inc_beta_xy(a, b, x, 1.0 - x)
}

/// CDF of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    debug_assert!(dof > 0.0);
    if t == 0.0 {
        return 0.5;
    }
    let t2 = t * t;
    let x = dof / (dof + t2);
    let y = t2 / (dof + t2);
    let tail = 0.5 * reg_inc_beta_xy(0.5 * dof, 0.5, x, y);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile of Student's t distribution, by bisection on [`student_t_cdf`]
/// to [`ROOT_TOL`].
pub fn student_t_quantile(p: f64, dof: f64) -> f64 {
    assert!(
        p > 0.0 && p < 1.0,
        "quantile level must lie in (0, 1), got {p}"
    );
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, dof);
    }
    let mut hi = 1.0;
    while student_t_cdf(hi, dof) < p {
        hi *= 2.0;
    }
    bisect(|t| student_t_cdf(t, dof) >= p, 0.0, hi, ROOT_TOL)
}

/// Finds the switch point of a predicate that is false on `[lo, x*)` and true
/// on `(x*, hi]`, to within `tol`.
pub fn bisect(pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    // 200 halvings exhaust f64 resolution for any finite bracket
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln P(Bin(n, p) = k)`.
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    debug_assert!(k <= n && (0.0..=1.0).contains(&p));
    let success = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let failure = if k == n {
        0.0
    } else {
        (n - k) as f64 * (-p).ln_1p()
    };
    ln_choose(n, k) + success + failure
}

/// `P(Bin(n, p) ≤ k)`.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    log_sum_exp((0..=k).map(|j| binomial_ln_pmf(j, n, p)))
        .exp()
        .min(1.0)
}

/// `P(Bin(n, p) ≥ k)`.
pub fn binomial_sf_ge(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    log_sum_exp((k..=n).map(|j| binomial_ln_pmf(j, n, p)))
        .exp()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for k in 1..30u32 {
            fact *= k as f64;
            let rel = (ln_gamma(k as f64 + 1.0) - fact.ln()).abs() / fact.ln().max(1.0);
            assert!(rel < 1e-13, "k = {k}");
        }
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn inc_beta_closed_forms() {
        // I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a
        for &x in &[0.01, 0.3, 0.5, 0.77, 0.999] {
            let f: f64 = x;
            assert!((reg_inc_beta(1.0, 3.0, x) - (1.0 - (1.0 - f).powi(3))).abs() < 1e-13);
            assert!((reg_inc_beta(2.5, 1.0, x) - f.powf(2.5)).abs() < 1e-13);
            // symmetry
            let lhs = reg_inc_beta(2.0, 5.0, x);
            let rhs = 1.0 - reg_inc_beta(5.0, 2.0, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn cauchy_quantile_is_tangent() {
        // t with one degree of freedom is Cauchy: q(p) = tan(pi (p - 1/2))
        for &p in &[0.6, 0.9, 0.975, 0.995] {
            let exact = (PI * (p - 0.5)).tan();
            assert!((student_t_quantile(p, 1.0) - exact).abs() < 1e-8, "p = {p}");
        }
        assert_eq!(student_t_quantile(0.5, 3.0), 0.0);
        assert!((student_t_quantile(0.025, 1.0) + student_t_quantile(0.975, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn binomial_tails_are_complementary() {
        for &(n, p) in &[(10u64, 0.3), (30, 0.5), (200, 0.91)] {
            for k in 0..=n {
                let total = binomial_cdf(k, n, p) + binomial_sf_ge(k + 1, n, p);
                assert!((total - 1.0).abs() < 1e-12, "n = {n}, k = {k}");
            }
        }
        assert_eq!(binomial_sf_ge(0, 5, 0.2), 1.0);
        assert!((binomial_sf_ge(5, 5, 0.2) - 0.2f64.powi(5)).abs() < 1e-18);
        assert!((binomial_cdf(0, 5, 0.2) - 0.8f64.powi(5)).abs() < 1e-15);
    }

    #[test]
    fn bisection_finds_square_root() {
        let r = bisect(|x| x * x >= 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
