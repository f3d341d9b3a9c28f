//! Summary statistics and goodness-of-fit tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{config_err, SimResult};

/// Standard normal CDF, `erfc(-x / sqrt 2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_error: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic_vs_normal: f64,
}

struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

fn central_moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    Moments {
        n,
        mean,
        m2: m2 / n,
        m3: m3 / n,
        m4: m4 / n,
    }
}

impl SummaryStats {
    fn build(xs: &[f64], ks: f64) -> SimResult<Self> {
        if xs.len() < 2 {
            return Err(config_err("summary statistics need at least 2 values"));
        }
        let m = central_moments(xs);
        let variance = m.m2 * m.n / (m.n - 1.0);
        let (skewness, excess_kurtosis) = if m.m2 > 0.0 {
            (m.m3 / m.m2.powf(1.5), m.m4 / (m.m2 * m.m2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        Ok(SummaryStats {
            count: xs.len() as u64,
            mean: m.mean,
            variance,
            std_error: (variance / m.n).sqrt(),
            skewness,
            excess_kurtosis,
            ks_statistic_vs_normal: ks,
        })
    }

    /// Moments of `xs`; the KS distance is taken after centering and scaling
    /// by the sample mean and standard deviation (NaN below 10 values or for
    /// a constant sample).
    pub fn from_sample(xs: &[f64]) -> SimResult<Self> {
        let m = central_moments(xs);
        let sd = m.m2.sqrt();
        let ks = if xs.len() >= 10 && sd > 0.0 {
            let z: Vec<f64> = xs.iter().map(|x| (x - m.mean) / sd).collect();
            ks_statistic(&z)?
        } else {
            f64::NAN
        };
        Self::build(xs, ks)
    }

    /// Moments of an already standardized sample; the KS distance compares
    /// `xs` itself with `N(0, 1)`.
    pub fn from_standardized(xs: &[f64]) -> SimResult<Self> {
        let ks = ks_statistic(xs)?;
        Self::build(xs, ks)
    }
}

/// `sup_x |F_n(x) - Phi(x)|` for the empirical CDF of `sample`.
pub fn ks_statistic(sample: &[f64]) -> SimResult<f64> {
    if sample.len() < 10 {
        return Err(config_err(format!(
            "KS statistic needs at least 10 values, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(config_err("KS sample contains NaN"));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = normal_cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Kolmogorov limiting survival function `Q(l) = 2 sum (-1)^{k-1} e^{-2 k^2 l^2}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleKs {
    pub statistic: f64,
    /// Asymptotic p-value; conservative for discrete data.
    pub p_value: f64,
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> SimResult<TwoSampleKs> {
    if a.is_empty() || b.is_empty() {
        return Err(config_err("two-sample KS needs nonempty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    Ok(TwoSampleKs {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts against `probabilities`.
///
/// Cells are merged, smallest expected count first, until every group expects
/// at least `min_expected`.
pub fn chi_square_gof(
    observed: &[u64],
    probabilities: &[f64],
    min_expected: f64,
) -> SimResult<ChiSquareTest> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err(config_err(
            "need matching observed/probability vectors of length >= 2",
        ));
    }
    let total: u64 = observed.iter().sum();
    let total_p: f64 = probabilities.iter().sum();
    if (total_p - 1.0).abs() > 1e-9 {
        return Err(config_err(format!("probabilities sum to {total_p}")));
    }
    let n = total as f64;
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| {
        probabilities[a]
            .total_cmp(&probabilities[b])
            .then(a.cmp(&b))
    });

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for &i in &order {
        acc.0 += observed[i] as f64;
        acc.1 += probabilities[i] * n;
        if acc.1 >= min_expected {
            groups.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => groups.push(acc),
        }
    }
    if groups.len() < 2 {
        return Err(config_err("too few cells after pooling"));
    }
    let statistic: f64 = groups.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = groups.len() - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| config_err(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        df,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
