//! Geweke's joint-distribution ("getting it right") check.
//!
//! The marginal-conditional simulator draws the state from the prior and the
//! data from the likelihood. The successive-conditional simulator alternates
//! one Gibbs sweep with a fresh data draw given the state. Both target the
//! same joint, so every moment of the state must agree up to Monte Carlo
//! error.

use rand::Rng;

use super::sweep;
use crate::diagnostics::effective_sample_size;
use crate::error::Result;
use crate::model::{GroupedDataset, Hyperparams, Mode, SamplerState, Truncation};
use crate::random::{sample_categorical, sample_gamma, sample_gaussian_iso, sample_log_dirichlet};

use super::conjugate::sample_prior_atom;

/// Draws a state from the joint prior: labels follow the weights.
pub fn sample_prior_state<R: Rng + ?Sized>(
    template: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    mode: Mode,
    rng: &mut R,
) -> Result<SamplerState> {
    let (l, t) = (trunc.global, trunc.local);
    let alpha = sample_gamma(hyper.alpha_shape, hyper.alpha_rate, rng)?;
    let gamma = sample_gamma(hyper.gamma_shape, hyper.gamma_rate, rng)?;
    let log_beta = sample_log_dirichlet(&vec![gamma / l as f64; l], rng)?;
    let phi = (0..l)
        .map(|_| sample_prior_atom(template.global_dim, &hyper.nig_global, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut state = SamplerState {
        log_beta,
        log_pi: Vec::new(),
        phi,
        psi: Vec::new(),
        t_labels: Vec::new(),
        k_table: Vec::new(),
        alpha,
        gamma,
    };
    for group in &template.groups {
        let log_pi = sample_log_dirichlet(&vec![alpha / t as f64; t], rng)?;
        let p = mode.effective_local_dim(group.local_dim);
        let psi = (0..if p == 0 { 0 } else { t })
            .map(|_| sample_prior_atom(p, &hyper.nig_local, rng))
            .collect::<Result<Vec<_>>>()?;
        let k = (0..t)
            .map(|_| sample_categorical(&state.log_beta, rng))
            .collect::<Result<Vec<_>>>()?;
        let labels = (0..group.len())
            .map(|_| sample_categorical(&log_pi, rng))
            .collect::<Result<Vec<_>>>()?;
        state.log_pi.push(log_pi);
        state.psi.push(psi);
        state.k_table.push(k);
        state.t_labels.push(labels);
    }
    Ok(state)
}

/// Overwrites every observation of `data` with a draw from the likelihood
/// given `state`.
pub fn resample_data<R: Rng + ?Sized>(
    data: &mut GroupedDataset,
    state: &SamplerState,
    mode: Mode,
    rng: &mut R,
) -> Result<()> {
    for (j, group) in data.groups.iter_mut().enumerate() {
        let p = mode.effective_local_dim(group.local_dim);
        for (obs, &t) in group.observations.iter_mut().zip(&state.t_labels[j]) {
            let phi = &state.phi[state.k_table[j][t]];
            obs.global = sample_gaussian_iso(&phi.mean, phi.var, rng)?;
            if p > 0 {
                let psi = &state.psi[j][t];
                obs.local = sample_gaussian_iso(&psi.mean, psi.var, rng)?;
            }
        }
    }
    Ok(())
}

/// Scalar functions of the state compared by the check.
pub fn monitored(state: &SamplerState) -> Vec<(String, f64)> {
    let mut out = vec![
        ("alpha".to_string(), state.alpha),
        ("gamma".to_string(), state.gamma),
        ("beta_1".to_string(), state.log_beta[0].exp()),
        ("pi_11".to_string(), state.log_pi[0][0].exp()),
        ("phi_1 mean".to_string(), state.phi[0].mean[0]),
        ("phi_1 log var".to_string(), state.phi[0].var.ln()),
        ("t_11 = 1".to_string(), f64::from(u8::from(state.t_labels[0][0] == 0))),
    ];
    if let Some(psi) = state.psi.iter().find_map(|g| g.first()) {
        out.push(("psi_11 mean".to_string(), psi.mean[0]));
    }
    out
}

/// One monitored moment from both simulators.
#[derive(Debug, Clone, PartialEq)]
pub struct GewekeMoment {
    pub name: String,
    pub forward_mean: f64,
    pub forward_se: f64,
    pub gibbs_mean: f64,
    /// Standard error using the effective sample size of the Gibbs series.
    pub gibbs_se: f64,
}

impl GewekeMoment {
    /// Difference in units of the combined standard error.
    pub fn z(&self) -> f64 {
        (self.forward_mean - self.gibbs_mean) / (self.forward_se.powi(2) + self.gibbs_se.powi(2)).sqrt()
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Runs both simulators, `n_forward` independent prior draws against
/// `n_sweeps` successive-conditional sweeps.
pub fn geweke_test<R: Rng + ?Sized>(
    template: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    mode: Mode,
    n_forward: usize,
    n_sweeps: usize,
    rng: &mut R,
) -> Result<Vec<GewekeMoment>> {
    let mut forward: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    for _ in 0..n_forward {
        let state = sample_prior_state(template, hyper, trunc, mode, rng)?;
        let m = monitored(&state);
        if forward.is_empty() {
            names = m.iter().map(|(n, _)| n.clone()).collect();
            forward = vec![Vec::with_capacity(n_forward); m.len()];
        }
        for (f, (_, v)) in forward.iter_mut().zip(m) {
            f.push(v);
        }
    }

    let mut data = template.clone();
    let mut state = sample_prior_state(template, hyper, trunc, mode, rng)?;
    resample_data(&mut data, &state, mode, rng)?;
    let mut gibbs = vec![Vec::with_capacity(n_sweeps); names.len()];
    for _ in 0..n_sweeps {
        sweep(&mut state, &data, hyper, mode, rng)?;
        resample_data(&mut data, &state, mode, rng)?;
        for (g, (_, v)) in gibbs.iter_mut().zip(monitored(&state)) {
            g.push(v);
        }
    }

    names
        .into_iter()
        .zip(forward.iter().zip(&gibbs))
        .map(|(name, (f, g))| {
            let (fm, fv) = mean_var(f);
            let (gm, gv) = mean_var(g);
            let ess = effective_sample_size(g)?;
            Ok(GewekeMoment {
                name,
                forward_mean: fm,
                forward_se: (fv / f.len() as f64).sqrt(),
                gibbs_mean: gm,
                gibbs_se: (gv / ess).sqrt(),
            })
        })
        .collect()
}
