//! Sample summaries and Welch's unequal-variance t-test.
//!
//! The Student-t tail is computed in-crate from the regularized incomplete
//! beta function (Lentz continued fraction) and a Lanczos log-gamma.

use serde::Serialize;

use crate::error::{Error, Position, Result};

/// Significance level used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Wall-clock duration of one full-file read, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct TimingSample {
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when `n == 1`.
    pub std: f64,
    /// False when `n == 1` and `std` is a placeholder.
    pub std_defined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub alpha: f64,
    pub significant: bool,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; requires at least two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn summarize(samples: &[f64]) -> Result<StatSummary> {
    match samples.len() {
        0 => Err(Error::domain(
            Position::Input,
            "cannot summarize an empty sample",
        )),
        1 => Ok(StatSummary {
            n: 1,
            mean: samples[0],
            std: 0.0,
            std_defined: false,
        }),
        n => Ok(StatSummary {
            n,
            mean: mean(samples),
            std: sample_variance(samples).sqrt(),
            std_defined: true,
        }),
    }
}

pub fn summarize_timings(samples: &[TimingSample]) -> Result<StatSummary> {
    let secs: Vec<f64> = samples.iter().map(|s| s.seconds).collect();
    summarize(&secs)
}

/// Two-sample t-test without the equal-variance assumption.
///
/// If both samples have zero variance the statistic is 0 (p = 1) for equal
/// means and infinite (p = 0) otherwise, with `df = n1 + n2 - 2`.
pub fn welch_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::domain(
            Position::Input,
            format!(
                "Welch's t-test needs at least 2 values per sample (got {} and {})",
                a.len(),
                b.len()
            ),
        ));
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (m1, m2) = (mean(a), mean(b));
    let q1 = sample_variance(a) / n1;
    let q2 = sample_variance(b) / n2;
    let se2 = q1 + q2;

    let (t, df, p) = if se2 == 0.0 {
        let df = n1 + n2 - 2.0;
        if m1 == m2 {
            (0.0, df, 1.0)
        } else {
            (f64::INFINITY.copysign(m1 - m2), df, 0.0)
        }
    } else {
        let t = (m1 - m2) / se2.sqrt();
        let df = se2 * se2 / (q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0));
        (t, df, student_t_two_sided(t, df))
    };
    Ok(WelchResult {
        t,
        df,
        p,
        alpha,
        significant: p < alpha,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let one_minus_x = t2 / (df + t2);
    inc_beta_split(x, one_minus_x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    inc_beta_split(x, 1.0 - x, a, b)
}

// Takes 1 - x separately so callers can supply it without cancellation.
fn inc_beta_split(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(y, b, a) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

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
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}
