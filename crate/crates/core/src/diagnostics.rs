//! Clustering accuracy and MCMC quality metrics.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A monitored scalar series from one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub chain_id: usize,
    pub values: Vec<f64>,
}

impl TraceSeries {
    pub fn new(chain_id: usize, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "trace value",
                value: f64::NAN,
            });
        }
        Ok(Self { chain_id, values })
    }
}

fn choose2(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Hubert-Arabie adjusted Rand index. Two single-cluster partitions (or any
/// case where the maximum index equals its expectation) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::SeriesTooShort {
            found: a.len(),
            needed: 2,
        });
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| choose2(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| choose2(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| choose2(n)).sum();
    let pairs = choose2(a.len() as u64);
    // (index - expected) / (max - expected), cleared of the pairs divisor so
    // that integer-valued inputs give a single rounding.
    let num = 2.0 * pairs * index - 2.0 * sum_a * sum_b;
    let den = pairs * (sum_a + sum_b) - 2.0 * sum_a * sum_b;
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(num / den)
}

fn centered(series: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let c: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0 = c.iter().map(|x| x * x).sum::<f64>() / n;
    if !(c0 > 0.0) || c0 < 1e-300 {
        return Err(Error::ConstantSeries);
    }
    Ok((c, c0))
}

fn autocov(c: &[f64], lag: usize) -> f64 {
    c.iter().zip(&c[lag..]).map(|(a, b)| a * b).sum::<f64>() / c.len() as f64
}

/// Sample autocorrelation at lags `0..=max_lag`, biased (1/N) normalization.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() <= max_lag {
        return Err(Error::SeriesTooShort {
            found: series.len(),
            needed: max_lag + 1,
        });
    }
    let (c, c0) = centered(series)?;
    Ok((0..=max_lag).map(|k| autocov(&c, k) / c0).collect())
}

/// `N / (1 + 2 sum rho_k)` with Geyer's initial positive sequence
/// truncation, clamped to `(0, N]`.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort {
            found: series.len(),
            needed: 4,
        });
    }
    let (c, c0) = centered(series)?;
    let n = series.len();
    let rho = |k: usize| autocov(&c, k) / c0;
    // tau = -1 + 2 sum_m (rho_2m + rho_2m+1) over the positive prefix
    let mut tau = -1.0;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = rho(2 * m) + rho(2 * m + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        m += 1;
    }
    let ess = n as f64 / tau;
    Ok(if ess.is_finite() && ess > 0.0 { ess.min(n as f64) } else { n as f64 })
}

/// Classic Gelman-Rubin potential scale reduction factor over equal-length
/// chains.
pub fn gelman_rubin(chains: &[&[f64]]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::TooFewChains(chains.len()));
    }
    let n = chains[0].len();
    if let Some(c) = chains.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: c.len(),
        });
    }
    if n < 10 {
        return Err(Error::SeriesTooShort { found: n, needed: 10 });
    }
    let nf = n as f64;
    let m = chains.len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| c.iter().sum::<f64>() / nf).collect();
    let vars: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, mu)| c.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (nf - 1.0))
        .collect();
    let w = vars.iter().sum::<f64>() / m;
    if !(w > 0.0) {
        return Err(Error::ConstantSeries);
    }
    let grand = means.iter().sum::<f64>() / m;
    let b = nf * means.iter().map(|mu| (mu - grand).powi(2)).sum::<f64>() / (m - 1.0);
    let v = (nf - 1.0) / nf * w + b / nf;
    Ok((v / w).sqrt())
}

/// Trapezoid integral of `(estimated - truth)^2` over `grid`.
pub fn mise(estimated: &[f64], truth: &[f64], grid: &[f64]) -> Result<f64> {
    if estimated.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    if grid.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: grid.len(),
            right: truth.len(),
        });
    }
    let sq: Vec<f64> = estimated.iter().zip(truth).map(|(e, t)| (e - t).powi(2)).collect();
    Ok(grid
        .windows(2)
        .zip(sq.windows(2))
        .map(|(g, s)| 0.5 * (g[1] - g[0]) * (s[0] + s[1]))
        .sum())
}
