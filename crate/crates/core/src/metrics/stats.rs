//! Descriptive statistics and the paired-sample t-test.
//!
//! Student's t CDF goes through the regularized incomplete beta function,
//! evaluated with the modified Lentz continued fraction, and a Lanczos
//! log-gamma. No statistics crate is involved.

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Lanczos coefficients for g = 7, n = 9.
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

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
/// x < (a + 1) / (a + b + 2).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=400 {
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

/// Regularized incomplete beta I_x(a, b), for a, b > 0 and x in [0, 1].
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

/// Two-sided tail probability P(|T| ≥ |t|) for Student's t with `df` degrees
/// of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    incomplete_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// CDF of Student's t.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = 0.5 * student_t_two_sided(t, df);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Sample mean and standard deviation (n − 1 denominator), computed in a
/// single Welford pass.
pub fn mean_sd(xs: &[f64]) -> Result<(f64, f64), MetricsError> {
    if xs.len() < 2 {
        return Err(MetricsError::TooFewSamples(xs.len()));
    }
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    Ok((mean, (m2 / (xs.len() - 1) as f64).sqrt()))
}

/// Percentage `100 · count / total`.
pub fn proportion(count: usize, total: usize) -> Result<f64, MetricsError> {
    if total == 0 || count > total {
        return Err(MetricsError::InvalidCounts { count, total });
    }
    Ok(100.0 * count as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    pub df: u32,
    pub p_two_sided: f64,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub n: usize,
}

/// Paired-sample t-test on `a − b`. Differences whose spread is at the
/// rounding level of the inputs count as zero variance.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean_diff, sd_diff) = mean_sd(&d)?;
    // differences that agree up to rounding of the inputs carry no spread
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    if d.iter().all(|x| *x == d[0]) || sd_diff <= 8.0 * f64::EPSILON * scale {
        return Err(MetricsError::ZeroVariance);
    }
    let n = d.len();
    let t_stat = mean_diff / (sd_diff / (n as f64).sqrt());
    let df = (n - 1) as u32;
    Ok(TTestResult {
        t_stat,
        df,
        p_two_sided: student_t_two_sided(t_stat, df as f64),
        mean_diff,
        sd_diff,
        n,
    })
}
