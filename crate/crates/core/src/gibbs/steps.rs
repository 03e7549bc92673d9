//! The eight full-conditional updates of one blocked Gibbs sweep.
//!
//! Labels are 0-based: `t_labels[j][i]` indexes the `T` local components of
//! group `j`, `k_table[j][t]` indexes the `L` global components.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use super::conjugate::{NigPosterior, SuffStats};
use crate::error::{Error, Result};
use crate::model::{iso_normal_ln_pdf, ln_gamma_pdf, GroupedDataset, Hyperparams, Mode, NigPrior, SamplerState};
use crate::random::{sample_categorical_in_place, sample_gamma, sample_log_dirichlet};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Occupancy `m_jt` of each local component in one group.
pub fn count_local(t_labels: &[usize], n_local: usize) -> Result<Vec<usize>> {
    let mut m = vec![0; n_local];
    for &t in t_labels {
        *m.get_mut(t).ok_or(Error::LabelOutOfRange {
            label: t,
            max: n_local.saturating_sub(1),
        })? += 1;
    }
    Ok(m)
}

/// Dirichlet parameters `m_jt + alpha / T` of the group-weight conditional.
pub fn group_weight_params(m: &[usize], alpha: f64) -> Vec<f64> {
    let a = alpha / m.len() as f64;
    m.iter().map(|&c| c as f64 + a).collect()
}

/// Draws `pi_j` (as log-probabilities) from its Dirichlet conditional.
pub fn update_group_weights<R: Rng + ?Sized>(m: &[usize], alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    sample_log_dirichlet(&group_weight_params(m, alpha), rng)
}

/// Number of tables `d_k` (over all groups) served global component `k`.
pub fn count_tables(k_table: &[Vec<usize>], n_global: usize) -> Result<Vec<usize>> {
    let mut d = vec![0; n_global];
    for &k in k_table.iter().flatten() {
        *d.get_mut(k).ok_or(Error::LabelOutOfRange {
            label: k,
            max: n_global.saturating_sub(1),
        })? += 1;
    }
    Ok(d)
}

pub fn global_weight_params(d: &[usize], gamma: f64) -> Vec<f64> {
    let a = gamma / d.len() as f64;
    d.iter().map(|&c| c as f64 + a).collect()
}

/// Draws `beta` (as log-probabilities). `d` must account for all `J * T`
/// tables.
pub fn update_global_weights<R: Rng + ?Sized>(
    d: &[usize],
    gamma: f64,
    n_tables: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let total: usize = d.iter().sum();
    if total != n_tables {
        return Err(Error::CountSumMismatch {
            found: total,
            expected: n_tables,
        });
    }
    sample_log_dirichlet(&global_weight_params(d, gamma), rng)
}

/// Pooled global-part statistics per global component, using the derived
/// labels `k_{j, t_ji}`.
pub fn global_component_stats(state: &SamplerState, data: &GroupedDataset) -> Vec<SuffStats> {
    let mut stats = vec![SuffStats::new(data.global_dim); state.phi.len()];
    for (j, group) in data.groups.iter().enumerate() {
        let k_j = &state.k_table[j];
        for (obs, &t) in group.observations.iter().zip(&state.t_labels[j]) {
            stats[k_j[t]].push(&obs.global);
        }
    }
    stats
}

/// Redraws every global atom from its NIG conditional; unoccupied components
/// draw from the prior.
pub fn update_global_atoms<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &GroupedDataset,
    prior: &NigPrior,
    rng: &mut R,
) -> Result<()> {
    let stats = global_component_stats(state, data);
    for (atom, s) in state.phi.iter_mut().zip(&stats) {
        *atom = NigPosterior::from_stats(s, prior)?.sample(rng)?;
    }
    Ok(())
}

/// Redraws the local atoms of every group that has local variables; other
/// groups (and every group in HDP mode) are left untouched.
pub fn update_local_atoms<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &GroupedDataset,
    prior: &NigPrior,
    mode: Mode,
    rng: &mut R,
) -> Result<()> {
    for (j, group) in data.groups.iter().enumerate() {
        let p = mode.effective_local_dim(group.local_dim);
        if p == 0 {
            continue;
        }
        let n_local = state.log_pi[j].len();
        let mut stats = vec![SuffStats::new(p); n_local];
        for (obs, &t) in group.observations.iter().zip(&state.t_labels[j]) {
            stats[t].push(&obs.local);
        }
        for (atom, s) in state.psi[j].iter_mut().zip(&stats) {
            *atom = NigPosterior::from_stats(s, prior)?.sample(rng)?;
        }
    }
    Ok(())
}

/// Unnormalized log-probabilities `log pi_jt + log f1 + log f2` of each local
/// component for observation `(j, i)`.
pub fn local_indicator_log_weights(
    state: &SamplerState,
    data: &GroupedDataset,
    mode: Mode,
    j: usize,
    i: usize,
) -> Vec<f64> {
    let group = &data.groups[j];
    let obs = &group.observations[i];
    let p = mode.effective_local_dim(group.local_dim);
    (0..state.log_pi[j].len())
        .map(|t| {
            let phi = &state.phi[state.k_table[j][t]];
            let mut w = state.log_pi[j][t] + iso_normal_ln_pdf(&obs.global, &phi.mean, phi.var);
            if p > 0 {
                let psi = &state.psi[j][t];
                w += iso_normal_ln_pdf(&obs.local, &psi.mean, psi.var);
            }
            w
        })
        .collect()
}

/// Resamples every `t_ji` given the rest of the state, visiting groups and
/// rows in order.
pub fn update_local_indicators<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &GroupedDataset,
    mode: Mode,
    rng: &mut R,
) -> Result<()> {
    let n_global = state.phi.len();
    let mut global_ll = vec![0.0; n_global];
    let mut weights = Vec::new();
    for (j, group) in data.groups.iter().enumerate() {
        let p = mode.effective_local_dim(group.local_dim);
        let n_local = state.log_pi[j].len();
        weights.resize(n_local, 0.0);
        for (i, obs) in group.observations.iter().enumerate() {
            for (ll, phi) in global_ll.iter_mut().zip(&state.phi) {
                *ll = iso_normal_ln_pdf(&obs.global, &phi.mean, phi.var);
            }
            for (t, w) in weights.iter_mut().enumerate() {
                *w = state.log_pi[j][t] + global_ll[state.k_table[j][t]];
                if p > 0 {
                    let psi = &state.psi[j][t];
                    *w += iso_normal_ln_pdf(&obs.local, &psi.mean, psi.var);
                }
            }
            state.t_labels[j][i] = sample_categorical_in_place(&mut weights, rng)?;
        }
    }
    Ok(())
}

/// Per-table sums of the global parts in group `j`.
fn table_stats(state: &SamplerState, data: &GroupedDataset, j: usize) -> Vec<SuffStats> {
    let mut stats = vec![SuffStats::new(data.global_dim); state.log_pi[j].len()];
    for (obs, &t) in data.groups[j].observations.iter().zip(&state.t_labels[j]) {
        stats[t].push(&obs.global);
    }
    stats
}

#[inline]
fn table_log_weight(log_beta: f64, stats: &SuffStats, mean: &[f64], var: f64) -> f64 {
    if stats.n == 0 {
        return log_beta;
    }
    // sum_i |x_i - mu|^2 = q - 2 mu.s + m |mu|^2
    let m = stats.n as f64;
    let dot: f64 = mean.iter().zip(&stats.sum).map(|(a, b)| a * b).sum();
    let norm: f64 = mean.iter().map(|a| a * a).sum();
    let quad = stats.sum_sq - 2.0 * dot + m * norm;
    log_beta - 0.5 * m * stats.dim() as f64 * (LN_2PI + var.ln()) - 0.5 * quad / var
}

/// Unnormalized log-probabilities `log beta_k + sum_{i: t_ji = t} log f2` of
/// each global component for table `(j, t)`.
pub fn global_indicator_log_weights(state: &SamplerState, data: &GroupedDataset, j: usize, t: usize) -> Vec<f64> {
    let stats = &table_stats(state, data, j)[t];
    state
        .phi
        .iter()
        .zip(&state.log_beta)
        .map(|(phi, &lb)| table_log_weight(lb, stats, &phi.mean, phi.var))
        .collect()
}

/// Resamples every `k_jt`; tables with no observations draw from `beta`.
pub fn update_global_indicators<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &GroupedDataset,
    rng: &mut R,
) -> Result<()> {
    let mut weights = vec![0.0; state.phi.len()];
    for j in 0..data.n_groups() {
        let stats = table_stats(state, data, j);
        for (t, s) in stats.iter().enumerate() {
            for (w, (phi, &lb)) in weights.iter_mut().zip(state.phi.iter().zip(&state.log_beta)) {
                *w = table_log_weight(lb, s, &phi.mean, phi.var);
            }
            state.k_table[j][t] = sample_categorical_in_place(&mut weights, rng)?;
        }
    }
    Ok(())
}

/// Outcome of one independence Metropolis-Hastings step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhOutcome {
    pub value: f64,
    pub accepted: bool,
    /// `min(1, ratio)`.
    pub acceptance_prob: f64,
}

/// Log of the unnormalized `alpha` conditional:
/// `J ln G(a) - JT ln G(a/T) + (a/T - 1) sum ln pi_jt + ln p(a)`.
pub fn alpha_log_target(alpha: f64, log_pi: &[Vec<f64>], hyper: &Hyperparams) -> f64 {
    if !(alpha > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut total = ln_gamma_pdf(alpha, hyper.alpha_shape, hyper.alpha_rate);
    for lp in log_pi {
        let t = lp.len() as f64;
        total += ln_gamma(alpha) - t * ln_gamma(alpha / t) + (alpha / t - 1.0) * lp.iter().sum::<f64>();
    }
    total
}

/// Log of the `gamma` conditional: `ln G(g) - L ln G(g/L) + (g/L - 1) sum ln beta_k + ln p(g)`.
pub fn gamma_log_target(gamma: f64, log_beta: &[f64], hyper: &Hyperparams) -> f64 {
    if !(gamma > 0.0) {
        return f64::NEG_INFINITY;
    }
    let l = log_beta.len() as f64;
    ln_gamma(gamma) - l * ln_gamma(gamma / l)
        + (gamma / l - 1.0) * log_beta.iter().sum::<f64>()
        + ln_gamma_pdf(gamma, hyper.gamma_shape, hyper.gamma_rate)
}

/// `ln [g(proposed) q(current) / (g(current) q(proposed))]` with the proposal
/// `q` equal to the `Gamma(shape, rate)` prior.
pub fn mh_log_ratio(
    current: f64,
    proposed: f64,
    log_target: impl Fn(f64) -> f64,
    shape: f64,
    rate: f64,
) -> f64 {
    let q = |x: f64| ln_gamma_pdf(x, shape, rate);
    (log_target(proposed) + q(current)) - (log_target(current) + q(proposed))
}

fn independence_mh<R: Rng + ?Sized>(
    current: f64,
    shape: f64,
    rate: f64,
    log_target: impl Fn(f64) -> f64,
    what: &'static str,
    rng: &mut R,
) -> Result<MhOutcome> {
    if !log_target(current).is_finite() {
        return Err(Error::NonFiniteTarget(what));
    }
    let proposed = sample_gamma(shape, rate, rng)?;
    let u = rng.random::<f64>();
    let log_ratio = if proposed > 0.0 {
        mh_log_ratio(current, proposed, &log_target, shape, rate)
    } else {
        f64::NEG_INFINITY
    };
    if log_ratio.is_nan() {
        return Err(Error::NonFiniteTarget(what));
    }
    let acceptance_prob = log_ratio.min(0.0).exp();
    let accepted = u < acceptance_prob;
    Ok(MhOutcome {
        value: if accepted { proposed } else { current },
        accepted,
        acceptance_prob,
    })
}

/// One MH update of `alpha` with the prior as proposal.
pub fn update_alpha<R: Rng + ?Sized>(state: &SamplerState, hyper: &Hyperparams, rng: &mut R) -> Result<MhOutcome> {
    independence_mh(
        state.alpha,
        hyper.alpha_shape,
        hyper.alpha_rate,
        |a| alpha_log_target(a, &state.log_pi, hyper),
        "alpha",
        rng,
    )
}

/// One MH update of `gamma` with the prior as proposal.
pub fn update_gamma<R: Rng + ?Sized>(state: &SamplerState, hyper: &Hyperparams, rng: &mut R) -> Result<MhOutcome> {
    independence_mh(
        state.gamma,
        hyper.gamma_shape,
        hyper.gamma_rate,
        |g| gamma_log_target(g, &state.log_beta, hyper),
        "gamma",
        rng,
    )
}
