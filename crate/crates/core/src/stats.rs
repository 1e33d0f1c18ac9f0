//! Bivariate validation statistics: Pearson correlation with a Fisher-z
//! confidence interval and a Student-t significance probability, sample
//! moments, and the simple least-squares line.
//!
//! All variances and covariances use the `n - 1` denominator.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ: {x} vs {y}")]
    Shape { x: usize, y: usize },
    #[error("series {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("need at least {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("correlation {0} must satisfy |r| < 1")]
    Domain(f64),
    #[error("unsupported confidence level {0}; use 0.90, 0.95 or 0.99")]
    UnsupportedLevel(f64),
}

/// Summary of one bivariate comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub n: usize,
    /// Confidence level of `ci_low..ci_high`.
    pub level: f64,
    pub r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub covariance: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub sd_x: f64,
    pub sd_y: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn check_pair(x: &[f64], y: &[f64], needed: usize) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Shape {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < needed {
        return Err(StatsError::InsufficientSample {
            needed,
            got: x.len(),
        });
    }
    Ok(())
}

/// Centered sums of squares and cross products: (Sxx, Syy, Sxy).
fn centered_sums(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).fold((0.0, 0.0, 0.0), |(sxx, syy, sxy), (&a, &b)| {
        let (dx, dy) = (a - mx, b - my);
        (sxx + dx * dx, syy + dy * dy, sxy + dx * dy)
    })
}

/// Sample mean and standard deviation.
pub fn mean_std(x: &[f64]) -> Result<(f64, f64), StatsError> {
    if x.len() < 2 {
        return Err(StatsError::InsufficientSample {
            needed: 2,
            got: x.len(),
        });
    }
    let m = mean(x);
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((m, (ss / (x.len() - 1) as f64).sqrt()))
}

pub fn covariance(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 2)?;
    let (_, _, sxy) = centered_sums(x, y);
    Ok(sxy / (x.len() - 1) as f64)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    let (sxx, syy, sxy) = centered_sums(x, y);
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-sided standard-normal critical value for the supported levels.
fn z_critical(level: f64) -> Result<f64, StatsError> {
    const TABLE: [(f64, f64); 3] = [
        (0.90, 1.644_853_626_951_472_2),
        (0.95, 1.959_963_984_540_054),
        (0.99, 2.575_829_303_548_900_4),
    ];
    TABLE
        .iter()
        .find(|(l, _)| (l - level).abs() < 1e-9)
        .map(|&(_, z)| z)
        .ok_or(StatsError::UnsupportedLevel(level))
}

/// Confidence interval for a correlation via the Fisher z-transform.
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<(f64, f64), StatsError> {
    if n < 4 {
        return Err(StatsError::InsufficientSample { needed: 4, got: n });
    }
    if !(r.abs() < 1.0) {
        return Err(StatsError::Domain(r));
    }
    let z = r.atanh();
    let half = z_critical(level)? / ((n - 3) as f64).sqrt();
    Ok(((z - half).tanh(), (z + half).tanh()))
}

/// Two-sided p-value for H0: rho = 0, from the t statistic with `n - 2`
/// degrees of freedom.
pub fn p_value(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::InsufficientSample { needed: 3, got: n });
    }
    if !(r.abs() < 1.0) {
        return Err(StatsError::Domain(r));
    }
    let df = (n - 2) as f64;
    let t2 = r * r * df / (1.0 - r * r);
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    Ok(regularized_incomplete_beta(df / (df + t2), df / 2.0, 0.5).clamp(0.0, 1.0))
}

pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<OlsFit, StatsError> {
    check_pair(x, y, 3)?;
    let (sxx, syy, sxy) = centered_sums(x, y);
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    let slope = sxy / sxx;
    let intercept = mean(y) - slope * mean(x);
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(OlsFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Everything above in one pass over the data.
pub fn summarize(x: &[f64], y: &[f64], level: f64) -> Result<StatsSummary, StatsError> {
    let r = pearson(x, y)?;
    let n = x.len();
    // A perfect fit sits on the boundary of both formulas; report their limits.
    let (ci_low, ci_high, p) = if r.abs() == 1.0 {
        if n < 4 {
            return Err(StatsError::InsufficientSample { needed: 4, got: n });
        }
        z_critical(level)?;
        (r, r, 0.0)
    } else {
        let (lo, hi) = fisher_ci(r, n, level)?;
        (lo, hi, p_value(r, n)?)
    };
    let (mean_x, sd_x) = mean_std(x)?;
    let (mean_y, sd_y) = mean_std(y)?;
    let fit = ols_fit(x, y)?;
    Ok(StatsSummary {
        n,
        level,
        r,
        ci_low,
        ci_high,
        p_value: p,
        covariance: covariance(x, y)?,
        mean_x,
        mean_y,
        sd_x,
        sd_y,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}

/// Lanczos approximation (g = 7, 9 terms).
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
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
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const CF_EPS: f64 = 1e-12;
const CF_MAX_ITER: usize = 200;

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
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
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// I_x(a, b), the regularized incomplete beta function.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The fraction converges fastest on this side of the mean.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}
