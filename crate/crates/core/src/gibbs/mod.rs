//! Blocked Gibbs sampler for the truncated GLocal mixture.

pub mod conjugate;
pub mod geweke;
pub mod steps;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{log_posterior, GroupedDataset, Hyperparams, Mode, SamplerState, Truncation};
use crate::random::{sample_gamma, sample_log_dirichlet, RngStream};
use crate::summary::{Draw, DrawParams, IterationStats, PosteriorDraws};

use conjugate::sample_prior_atom;
use steps::*;

/// How a chain's first state is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// Everything from the prior; labels uniform. Over-dispersed, which is
    /// what multi-chain R-hat wants.
    #[default]
    Prior,
    /// As `Prior`, but every observation starts at local component 1 and
    /// every table at global component 1.
    OneCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_chains: usize,
    pub init: InitPolicy,
    /// Keep weights and atoms with every retained draw (needed for densities).
    pub retain_atoms: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self::with_iterations(20_000)
    }
}

impl ChainConfig {
    pub fn new(iterations: usize, burn_in: usize, thin: usize) -> Result<Self> {
        let c = Self {
            iterations,
            burn_in,
            thin,
            n_chains: 1,
            init: InitPolicy::Prior,
            retain_atoms: false,
        };
        c.validate()?;
        Ok(c)
    }

    /// Burn-in of a quarter of the run and a thinning that keeps about 1000
    /// draws.
    pub fn with_iterations(iterations: usize) -> Self {
        let burn_in = iterations / 4;
        let thin = ((iterations - burn_in) / 1000).max(1);
        Self {
            iterations,
            burn_in,
            thin,
            n_chains: 1,
            init: InitPolicy::Prior,
            retain_atoms: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidChainConfig("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidChainConfig(format!(
                "burn_in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidChainConfig("thin must be positive".into()));
        }
        if self.n_chains == 0 {
            return Err(Error::InvalidChainConfig("n_chains must be positive".into()));
        }
        if self.retained() == 0 {
            return Err(Error::InvalidChainConfig(format!(
                "(iterations - burn_in) / thin = ({} - {}) / {} keeps no draws",
                self.iterations, self.burn_in, self.thin
            )));
        }
        Ok(())
    }

    /// Number of retained draws, `floor((iterations - burn_in) / thin)`.
    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    /// Whether the state after 1-based sweep `iteration` is kept.
    pub fn keeps(&self, iteration: usize) -> bool {
        iteration > self.burn_in && (iteration - self.burn_in).is_multiple_of(self.thin)
    }
}

/// Draws a starting state.
pub fn init_state<R: Rng + ?Sized>(
    data: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    mode: Mode,
    policy: InitPolicy,
    rng: &mut R,
) -> Result<SamplerState> {
    let (l, t) = (trunc.global, trunc.local);
    let alpha = sample_gamma(hyper.alpha_shape, hyper.alpha_rate, rng)?;
    let gamma = sample_gamma(hyper.gamma_shape, hyper.gamma_rate, rng)?;
    let log_beta = sample_log_dirichlet(&vec![gamma / l as f64; l], rng)?;
    let mut log_pi = Vec::with_capacity(data.n_groups());
    for _ in &data.groups {
        log_pi.push(sample_log_dirichlet(&vec![alpha / t as f64; t], rng)?);
    }
    let phi = (0..l)
        .map(|_| sample_prior_atom(data.global_dim, &hyper.nig_global, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut psi = Vec::with_capacity(data.n_groups());
    for group in &data.groups {
        let p = mode.effective_local_dim(group.local_dim);
        if p == 0 {
            psi.push(Vec::new());
        } else {
            psi.push((0..t).map(|_| sample_prior_atom(p, &hyper.nig_local, rng)).collect::<Result<_>>()?);
        }
    }
    let (t_labels, k_table) = match policy {
        InitPolicy::Prior => (
            data.groups
                .iter()
                .map(|g| (0..g.len()).map(|_| rng.random_range(0..t)).collect())
                .collect(),
            data.groups
                .iter()
                .map(|_| (0..t).map(|_| rng.random_range(0..l)).collect())
                .collect(),
        ),
        InitPolicy::OneCluster => (
            data.groups.iter().map(|g| vec![0; g.len()]).collect(),
            data.groups.iter().map(|_| vec![0; t]).collect(),
        ),
    };
    Ok(SamplerState {
        log_beta,
        log_pi,
        phi,
        psi,
        t_labels,
        k_table,
        alpha,
        gamma,
    })
}

/// Acceptance flags of the two MH steps of one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutcome {
    pub alpha: MhOutcome,
    pub gamma: MhOutcome,
}

/// One full sweep: `pi`, `beta`, `phi`, `psi`, `t`, `k`, `alpha`, `gamma`.
pub fn sweep<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &GroupedDataset,
    hyper: &Hyperparams,
    mode: Mode,
    rng: &mut R,
) -> Result<SweepOutcome> {
    let n_local = state.log_pi.first().map_or(0, Vec::len);
    let n_global = state.log_beta.len();
    for j in 0..data.n_groups() {
        let m = count_local(&state.t_labels[j], n_local)?;
        state.log_pi[j] = update_group_weights(&m, state.alpha, rng)?;
    }
    let d = count_tables(&state.k_table, n_global)?;
    state.log_beta = update_global_weights(&d, state.gamma, data.n_groups() * n_local, rng)?;
    update_global_atoms(state, data, &hyper.nig_global, rng)?;
    update_local_atoms(state, data, &hyper.nig_local, mode, rng)?;
    update_local_indicators(state, data, mode, rng)?;
    update_global_indicators(state, data, rng)?;
    let alpha = update_alpha(state, hyper, rng)?;
    state.alpha = alpha.value;
    let gamma = update_gamma(state, hyper, rng)?;
    state.gamma = gamma.value;
    Ok(SweepOutcome { alpha, gamma })
}

/// Runs one chain and returns its retained draws and per-sweep trace.
pub fn run_chain<R: Rng + ?Sized>(
    data: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    config: &ChainConfig,
    mode: Mode,
    rng: &mut R,
) -> Result<PosteriorDraws> {
    data.validate()?;
    hyper.validate()?;
    trunc.validate()?;
    config.validate()?;
    let mut state = init_state(data, hyper, trunc, mode, config.init, rng)?;
    let mut draws = Vec::with_capacity(config.retained());
    let mut trace = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let wrap = |e| Error::Iteration {
            iteration,
            source: Box::new(e),
        };
        let outcome = sweep(&mut state, data, hyper, mode, rng).map_err(wrap)?;
        let lp = log_posterior(&state, data, hyper, trunc, mode).map_err(wrap)?;
        trace.push(IterationStats {
            iteration,
            log_posterior: lp,
            alpha: state.alpha,
            gamma: state.gamma,
            alpha_accepted: outcome.alpha.accepted,
            gamma_accepted: outcome.gamma.accepted,
        });
        if config.keeps(iteration) {
            draws.push(Draw {
                iteration,
                t_labels: state.t_labels.clone(),
                k_table: state.k_table.clone(),
                alpha: state.alpha,
                gamma: state.gamma,
                log_posterior: lp,
                params: config.retain_atoms.then(|| DrawParams {
                    log_beta: state.log_beta.clone(),
                    log_pi: state.log_pi.clone(),
                    phi: state.phi.clone(),
                    psi: state.psi.clone(),
                }),
            });
        }
    }
    Ok(PosteriorDraws {
        mode,
        truncation: trunc,
        group_sizes: data.group_sizes(),
        local_dims: data.groups.iter().map(|g| mode.effective_local_dim(g.local_dim)).collect(),
        draws,
        trace,
    })
}

/// Runs `config.n_chains` chains in parallel; chain `c` uses
/// `RngStream::new(seed, c)`.
pub fn run_chains(
    data: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    config: &ChainConfig,
    mode: Mode,
    seed: u64,
) -> Result<Vec<PosteriorDraws>> {
    config.validate()?;
    (0..config.n_chains as u64)
        .into_par_iter()
        .map(|c| run_chain(data, hyper, trunc, config, mode, &mut RngStream::new(seed, c)))
        .collect()
}
