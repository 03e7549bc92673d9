//! Normal-inverse-gamma conjugate updates for isotropic Gaussian atoms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Atom, NigPrior};
use crate::random::{sample_gaussian_iso, sample_inverse_gamma};

/// Sufficient statistics of the rows assigned to one component.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffStats {
    pub n: usize,
    pub sum: Vec<f64>,
    pub sum_sq: f64,
}

impl SuffStats {
    pub fn new(dim: usize) -> Self {
        Self {
            n: 0,
            sum: vec![0.0; dim],
            sum_sq: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: &[f64]) {
        self.n += 1;
        for (s, v) in self.sum.iter_mut().zip(x) {
            *s += v;
        }
        self.sum_sq += x.iter().map(|v| v * v).sum::<f64>();
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn clear(&mut self) {
        self.n = 0;
        self.sum.iter_mut().for_each(|s| *s = 0.0);
        self.sum_sq = 0.0;
    }
}

/// Posterior NIG parameters: `sigma^2 ~ IG(shape, rate)`,
/// `mu | sigma^2 ~ N(mean, sigma^2 / precision * I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NigPosterior {
    pub mean: Vec<f64>,
    pub precision: f64,
    pub shape: f64,
    pub rate: f64,
}

impl NigPosterior {
    pub fn from_stats(stats: &SuffStats, prior: &NigPrior) -> Result<Self> {
        let dim = stats.dim();
        let m0 = prior.mean.resolve(dim)?;
        let n = stats.n as f64;
        let precision = prior.precision + n;
        let mean: Vec<f64> = m0
            .iter()
            .zip(&stats.sum)
            .map(|(m, s)| (prior.precision * m + s) / precision)
            .collect();
        let shape = prior.shape + 0.5 * n * dim as f64;
        // Centered form: scatter about the sample mean plus the shrinkage
        // term, which avoids the cancellation in q + l0|m0|^2 - ln|mn|^2.
        let rate = if stats.n == 0 {
            prior.rate
        } else {
            let xbar: Vec<f64> = stats.sum.iter().map(|s| s / n).collect();
            let scatter = (stats.sum_sq - n * xbar.iter().map(|v| v * v).sum::<f64>()).max(0.0);
            let shift: f64 = xbar.iter().zip(&m0).map(|(a, b)| (a - b).powi(2)).sum();
            prior.rate + 0.5 * scatter + 0.5 * prior.precision * n / precision * shift
        };
        Ok(Self {
            mean,
            precision,
            shape,
            rate,
        })
    }

    /// Draws `sigma^2 ~ IG(shape, rate)` then `mu ~ N(mean, sigma^2 / precision)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Atom> {
        let var = sample_inverse_gamma(self.shape, self.rate, rng)?;
        let mean = sample_gaussian_iso(&self.mean, var / self.precision, rng)?;
        Ok(Atom::new(mean, var))
    }
}

/// Conjugate posterior for the rows assigned to one component. With no rows
/// the result equals the prior.
pub fn nig_posterior(rows: &[&[f64]], dim: usize, prior: &NigPrior) -> Result<NigPosterior> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            found: 0,
            expected: 1,
        });
    }
    let mut stats = SuffStats::new(dim);
    for row in rows {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                found: row.len(),
                expected: dim,
            });
        }
        stats.push(row);
    }
    NigPosterior::from_stats(&stats, prior)
}

/// Atom drawn from the prior itself.
pub fn sample_prior_atom<R: Rng + ?Sized>(dim: usize, prior: &NigPrior, rng: &mut R) -> Result<Atom> {
    NigPosterior::from_stats(&SuffStats::new(dim), prior)?.sample(rng)
}
