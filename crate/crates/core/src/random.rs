//! Seeded sampling primitives.
//!
//! Every stochastic step draws from an [`RngStream`]: a ChaCha8 generator
//! keyed by a 64-bit seed and a stream id (the chain index). Equal
//! `(seed, stream_id)` pairs reproduce the same draws bit for bit, and
//! distinct stream ids select non-overlapping ChaCha streams.
//!
//! Gamma-family draws use the shape-rate parameterization everywhere.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// SplitMix64 finalizer; derives independent sub-seeds (per replicate, per
/// role) from a user seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// `Gamma(shape, rate)` draw; mean `shape / rate`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    let dist = Gamma::new(shape, 1.0 / rate).map_err(|_| Error::InvalidParameter {
        name: "shape",
        value: shape,
    })?;
    Ok(dist.sample(rng))
}

/// Log of a `Gamma(shape, 1)` draw, computed without forming the draw for
/// small shapes: for `shape < 1`, `G = G' * U^(1/shape)` with
/// `G' ~ Gamma(shape + 1, 1)`, so `ln G = ln G' + ln(U) / shape` stays finite
/// where `G` itself would underflow.
pub fn sample_log_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    check_positive("shape", shape)?;
    if shape >= 1.0 {
        let g: f64 = Gamma::new(shape, 1.0).unwrap().sample(rng);
        Ok(g.ln())
    } else {
        let g: f64 = Gamma::new(shape + 1.0, 1.0).unwrap().sample(rng);
        // (0, 1]; avoids ln(0)
        let u = 1.0 - rng.random::<f64>();
        Ok(g.ln() + u.ln() / shape)
    }
}

/// `1 / Gamma(shape, rate)`; mean `rate / (shape - 1)` for `shape > 1`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    Ok(1.0 / sample_gamma(shape, rate, rng)?)
}

/// Log-coordinates of a `Dirichlet(params)` draw, via normalized log-gamma
/// draws.
pub fn sample_log_dirichlet<R: Rng + ?Sized>(params: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if params.is_empty() {
        return Err(Error::InvalidParameter {
            name: "dirichlet length",
            value: 0.0,
        });
    }
    let mut logs = Vec::with_capacity(params.len());
    for &a in params {
        check_positive("dirichlet parameter", a)?;
        logs.push(sample_log_gamma(a, rng)?);
    }
    let norm = log_sum_exp(&logs);
    logs.iter_mut().for_each(|l| *l -= norm);
    Ok(logs)
}

/// `Dirichlet(params)` draw on the probability simplex.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let logs = sample_log_dirichlet(params, rng)?;
    let mut probs: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    // exp of normalized logs sums to 1 up to rounding; renormalize the residue
    let s: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= s);
    Ok(probs)
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Draws index `k` with probability `exp(w_k) / sum exp(w)`.
pub fn sample_categorical<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> Result<usize> {
    let mut buf = log_weights.to_vec();
    sample_categorical_in_place(&mut buf, rng)
}

/// As [`sample_categorical`], overwriting `weights` with the unnormalized
/// linear-scale weights. Used in the sampler's inner loops to avoid an
/// allocation per draw.
pub fn sample_categorical_in_place<R: Rng + ?Sized>(
    weights: &mut [f64],
    rng: &mut R,
) -> Result<usize> {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > f64::NEG_INFINITY) || weights.iter().any(|w| w.is_nan()) || max == f64::INFINITY {
        return Err(Error::DegenerateWeights);
    }
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = k;
            if target < acc {
                return Ok(k);
            }
        }
    }
    // rounding can leave target == total
    Ok(last_positive)
}

/// Vector with independent `N(mean_i, var)` coordinates.
pub fn sample_gaussian_iso<R: Rng + ?Sized>(mean: &[f64], var: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_positive("variance", var)?;
    let sd = var.sqrt();
    Ok(mean
        .iter()
        .map(|m| {
            let z: f64 = StandardNormal.sample(rng);
            m + sd * z
        })
        .collect())
}
