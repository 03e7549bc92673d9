//! Domain types for grouped data with shared ("global") and group-specific
//! ("local") variables, the component densities, and the joint log-posterior
//! of the truncated global-local mixture.
//!
//! Cluster labels are 0-based throughout the library API; the CLI writes
//! them 1-based.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// One observation: the group-specific part `x^L` and the shared part `x^G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub local: Vec<f64>,
    pub global: Vec<f64>,
}

impl Observation {
    pub fn new(local: Vec<f64>, global: Vec<f64>) -> Self {
        Self { local, global }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupData {
    pub name: String,
    /// Declared dimension `p_j` of the local part; zero means the group has
    /// no local variables.
    pub local_dim: usize,
    pub observations: Vec<Observation>,
}

impl GroupData {
    pub fn new(name: impl Into<String>, local_dim: usize, observations: Vec<Observation>) -> Self {
        Self {
            name: name.into(),
            local_dim,
            observations,
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedDataset {
    pub global_dim: usize,
    pub groups: Vec<GroupData>,
}

impl GroupedDataset {
    pub fn new(global_dim: usize, groups: Vec<GroupData>) -> Self {
        Self { global_dim, groups }
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_total(&self) -> usize {
        self.groups.iter().map(GroupData::len).sum()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(GroupData::len).collect()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.local_dim).collect()
    }

    /// Copy of the dataset with every local column removed, i.e. the input
    /// an HDP fit sees.
    pub fn without_local(&self) -> Self {
        let groups = self
            .groups
            .iter()
            .map(|g| GroupData {
                name: g.name.clone(),
                local_dim: 0,
                observations: g
                    .observations
                    .iter()
                    .map(|o| Observation::new(Vec::new(), o.global.clone()))
                    .collect(),
            })
            .collect();
        Self {
            global_dim: self.global_dim,
            groups,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_dataset(self).map(|_| ())
    }
}

/// Checks every dataset invariant, reporting the first violation with
/// 1-based group and row indices.
pub fn validate_dataset(data: &GroupedDataset) -> Result<&GroupedDataset> {
    if data.groups.is_empty() {
        return Err(Error::NoGroups);
    }
    if data.global_dim == 0 {
        return Err(Error::ZeroGlobalDim);
    }
    for (j, group) in data.groups.iter().enumerate() {
        if group.observations.is_empty() {
            return Err(Error::EmptyGroup { group: j + 1 });
        }
        for (i, obs) in group.observations.iter().enumerate() {
            if obs.global.len() != data.global_dim {
                return Err(Error::RowDimension {
                    group: j + 1,
                    row: i + 1,
                    what: "global part",
                    found: obs.global.len(),
                    expected: data.global_dim,
                });
            }
            if obs.local.len() != group.local_dim {
                return Err(Error::RowDimension {
                    group: j + 1,
                    row: i + 1,
                    what: "local part",
                    found: obs.local.len(),
                    expected: group.local_dim,
                });
            }
            for (what, values) in [("local", &obs.local), ("global", &obs.global)] {
                if let Some(c) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        group: j + 1,
                        row: i + 1,
                        what,
                        column: c + 1,
                    });
                }
            }
        }
    }
    Ok(data)
}

/// Truncation levels: `global` = L shared components, `local` = T components
/// per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub global: usize,
    pub local: usize,
}

impl Truncation {
    pub fn new(global: usize, local: usize) -> Result<Self> {
        let t = Self { global, local };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.global == 0 || self.global > self.local {
            return Err(Error::InvalidTruncation {
                global: self.global,
                local: self.local,
            });
        }
        Ok(())
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            global: 20,
            local: 20,
        }
    }
}

/// Prior mean of an NIG prior: a scalar broadcast to every coordinate, or an
/// explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorMean {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PriorMean {
    pub fn at(&self, i: usize) -> f64 {
        match self {
            PriorMean::Scalar(m) => *m,
            PriorMean::Vector(v) => v[i],
        }
    }

    pub fn resolve(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            PriorMean::Scalar(m) => Ok(vec![*m; dim]),
            PriorMean::Vector(v) if v.len() == dim => Ok(v.clone()),
            PriorMean::Vector(v) => Err(Error::DimensionMismatch {
                found: v.len(),
                expected: dim,
            }),
        }
    }
}

/// Normal-inverse-gamma prior on an atom `(mu, sigma^2)`:
/// `sigma^2 ~ IG(shape, rate)`, `mu | sigma^2 ~ N(mean, sigma^2 / precision * I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NigPrior {
    pub mean: PriorMean,
    pub precision: f64,
    pub shape: f64,
    pub rate: f64,
}

impl Default for NigPrior {
    fn default() -> Self {
        Self {
            mean: PriorMean::Scalar(0.0),
            precision: 1.0,
            shape: 0.1,
            rate: 0.1,
        }
    }
}

impl NigPrior {
    pub fn new(mean: f64, precision: f64, shape: f64, rate: f64) -> Result<Self> {
        let p = Self {
            mean: PriorMean::Scalar(mean),
            precision,
            shape,
            rate,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("nig precision", self.precision)?;
        positive("nig shape", self.shape)?;
        positive("nig rate", self.rate)?;
        match &self.mean {
            PriorMean::Scalar(m) if !m.is_finite() => Err(Error::InvalidParameter {
                name: "nig mean",
                value: *m,
            }),
            PriorMean::Vector(v) => match v.iter().find(|m| !m.is_finite()) {
                Some(m) => Err(Error::InvalidParameter {
                    name: "nig mean",
                    value: *m,
                }),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Log density of an atom under this prior.
    pub fn ln_pdf(&self, atom: &Atom) -> f64 {
        let sd2 = atom.var / self.precision;
        let quad: f64 = atom
            .mean
            .iter()
            .enumerate()
            .map(|(i, m)| (m - self.mean.at(i)).powi(2))
            .sum();
        let p = atom.mean.len() as f64;
        let normal = -0.5 * p * (LN_2PI + sd2.ln()) - 0.5 * quad / sd2;
        normal + ln_inverse_gamma_pdf(atom.var, self.shape, self.rate)
    }
}

/// Gamma hyperpriors on the concentrations (shape-rate) and NIG priors on the
/// global and local atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub alpha_shape: f64,
    pub alpha_rate: f64,
    pub gamma_shape: f64,
    pub gamma_rate: f64,
    pub nig_global: NigPrior,
    pub nig_local: NigPrior,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha_shape: 0.1,
            alpha_rate: 0.1,
            gamma_shape: 0.1,
            gamma_rate: 0.1,
            nig_global: NigPrior::default(),
            nig_local: NigPrior::default(),
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        positive("alpha_shape", self.alpha_shape)?;
        positive("alpha_rate", self.alpha_rate)?;
        positive("gamma_shape", self.gamma_shape)?;
        positive("gamma_rate", self.gamma_rate)?;
        self.nig_global.validate()?;
        self.nig_local.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Glocal,
    /// Local densities fixed to 1 and local atoms never sampled.
    Hdp,
}

impl Mode {
    /// Local dimension the sampler actually uses for a group.
    pub fn effective_local_dim(self, declared: usize) -> usize {
        match self {
            Mode::Glocal => declared,
            Mode::Hdp => 0,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Glocal => "glocal",
            Mode::Hdp => "hdp",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "glocal" => Ok(Mode::Glocal),
            "hdp" => Ok(Mode::Hdp),
            other => Err(format!("unknown mode {other:?}, expected glocal or hdp")),
        }
    }
}

/// Gaussian atom with isotropic covariance `var * I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub mean: Vec<f64>,
    pub var: f64,
}

impl Atom {
    pub fn new(mean: Vec<f64>, var: f64) -> Self {
        Self { mean, var }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// All latent quantities of one sweep.
///
/// Weights are held as log-probabilities: Dirichlet draws with tiny
/// parameters routinely underflow in linear space, while their logs stay
/// finite. `beta()` and `pi(j)` give the linear-scale simplex vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerState {
    pub log_beta: Vec<f64>,
    pub log_pi: Vec<Vec<f64>>,
    pub phi: Vec<Atom>,
    /// Local atoms per group; empty for groups without local variables and
    /// for every group in HDP mode.
    pub psi: Vec<Vec<Atom>>,
    pub t_labels: Vec<Vec<usize>>,
    pub k_table: Vec<Vec<usize>>,
    pub alpha: f64,
    pub gamma: f64,
}

impl SamplerState {
    pub fn beta(&self) -> Vec<f64> {
        self.log_beta.iter().map(|l| l.exp()).collect()
    }

    pub fn pi(&self, group: usize) -> Vec<f64> {
        self.log_pi[group].iter().map(|l| l.exp()).collect()
    }

    /// Global label `k_{j, t_ji}` of every observation of group `j`.
    pub fn global_labels(&self, group: usize) -> Vec<usize> {
        let k = &self.k_table[group];
        self.t_labels[group].iter().map(|&t| k[t]).collect()
    }

    /// Checks shapes, label ranges, simplex sums and positivity against the
    /// data and truncation.
    pub fn check(&self, data: &GroupedDataset, trunc: Truncation, mode: Mode) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentState(msg));
        let (l, t) = (trunc.global, trunc.local);
        let j_groups = data.n_groups();
        if self.log_beta.len() != l || self.phi.len() != l {
            return bad(format!("expected {l} global weights and atoms"));
        }
        if [
            self.log_pi.len(),
            self.psi.len(),
            self.t_labels.len(),
            self.k_table.len(),
        ]
        .iter()
        .any(|&len| len != j_groups)
        {
            return bad(format!("expected per-group blocks for {j_groups} groups"));
        }
        check_simplex("beta", &self.log_beta)?;
        for atom in &self.phi {
            if atom.dim() != data.global_dim || !(atom.var > 0.0) {
                return bad("malformed global atom".into());
            }
        }
        if !(self.alpha > 0.0 && self.gamma > 0.0) {
            return bad("concentrations must be positive".into());
        }
        for (j, group) in data.groups.iter().enumerate() {
            if self.log_pi[j].len() != t || self.k_table[j].len() != t {
                return bad(format!("group {}: expected {t} local weights", j + 1));
            }
            check_simplex("pi", &self.log_pi[j])?;
            if self.t_labels[j].len() != group.len() {
                return bad(format!("group {}: label count mismatch", j + 1));
            }
            if let Some(&x) = self.t_labels[j].iter().find(|&&x| x >= t) {
                return Err(Error::LabelOutOfRange { label: x, max: t - 1 });
            }
            if let Some(&x) = self.k_table[j].iter().find(|&&x| x >= l) {
                return Err(Error::LabelOutOfRange { label: x, max: l - 1 });
            }
            let p = mode.effective_local_dim(group.local_dim);
            let expected_psi = if p > 0 { t } else { 0 };
            if mode == Mode::Glocal && self.psi[j].len() != expected_psi {
                return bad(format!(
                    "group {}: expected {expected_psi} local atoms",
                    j + 1
                ));
            }
            if p > 0 && self.psi[j].iter().any(|a| a.dim() != p || !(a.var > 0.0)) {
                return bad(format!("group {}: malformed local atom", j + 1));
            }
        }
        Ok(())
    }
}

fn check_simplex(name: &str, log_w: &[f64]) -> Result<()> {
    let sum: f64 = log_w.iter().map(|l| l.exp()).sum();
    if log_w.iter().any(|l| l.is_nan() || *l > 1e-12) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::InconsistentState(format!(
            "{name} is not a probability vector (sum {sum})"
        )));
    }
    Ok(())
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// Log density of `N(mean, var * I)` at `x`, without argument checks.
#[inline]
pub(crate) fn iso_normal_ln_pdf(x: &[f64], mean: &[f64], var: f64) -> f64 {
    let quad: f64 = x.iter().zip(mean).map(|(a, b)| (a - b) * (a - b)).sum();
    -0.5 * x.len() as f64 * (LN_2PI + var.ln()) - 0.5 * quad / var
}

/// Log density of the isotropic Gaussian global component at `x`.
pub fn log_density_global(x: &[f64], atom: &Atom) -> Result<f64> {
    if x.len() != atom.dim() {
        return Err(Error::DimensionMismatch {
            found: x.len(),
            expected: atom.dim(),
        });
    }
    if !(atom.var > 0.0) {
        return Err(Error::InvalidParameter {
            name: "variance",
            value: atom.var,
        });
    }
    Ok(iso_normal_ln_pdf(x, &atom.mean, atom.var))
}

/// Log density of the local component. Exactly 0 (density 1) when the group
/// has no local variables, in which case `atom` may be `None`.
pub fn log_density_local(x: &[f64], atom: Option<&Atom>, local_dim: usize) -> Result<f64> {
    if local_dim == 0 {
        return Ok(0.0);
    }
    if x.len() != local_dim {
        return Err(Error::DimensionMismatch {
            found: x.len(),
            expected: local_dim,
        });
    }
    match atom {
        Some(a) => log_density_global(x, a),
        None => Err(Error::InconsistentState(
            "missing local atom for a group with local variables".into(),
        )),
    }
}

pub fn ln_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

pub fn ln_inverse_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - rate / x
}

/// Log density of a symmetric `Dir(c/K, ..., c/K)` at a point given by its
/// log-coordinates.
pub fn ln_symmetric_dirichlet_pdf(log_w: &[f64], concentration: f64) -> f64 {
    let k = log_w.len() as f64;
    let a = concentration / k;
    ln_gamma(concentration) - k * ln_gamma(a) + (a - 1.0) * log_w.iter().sum::<f64>()
}

/// The joint log-posterior split into its additive pieces.
///
/// Every normalizing constant is kept (Gaussian `2*pi` terms, Dirichlet,
/// gamma and inverse-gamma constants), so `total()` is the log joint density
/// of data and all latent variables with no dropped constant. Traces from
/// different runs on the same data are therefore directly comparable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogPosteriorTerms {
    pub local_likelihood: f64,
    pub global_likelihood: f64,
    pub local_assignment: f64,
    pub table_assignment: f64,
    pub local_atom_prior: f64,
    pub global_atom_prior: f64,
    pub local_weight_prior: f64,
    pub global_weight_prior: f64,
    pub alpha_prior: f64,
    pub gamma_prior: f64,
}

impl LogPosteriorTerms {
    pub fn total(&self) -> f64 {
        self.local_likelihood
            + self.global_likelihood
            + self.local_assignment
            + self.table_assignment
            + self.local_atom_prior
            + self.global_atom_prior
            + self.local_weight_prior
            + self.global_weight_prior
            + self.alpha_prior
            + self.gamma_prior
    }
}

pub fn log_posterior_terms(
    state: &SamplerState,
    data: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    mode: Mode,
) -> Result<LogPosteriorTerms> {
    state.check(data, trunc, mode)?;
    let mut terms = LogPosteriorTerms::default();
    for (j, group) in data.groups.iter().enumerate() {
        let p = mode.effective_local_dim(group.local_dim);
        let (t_j, k_j, log_pi) = (&state.t_labels[j], &state.k_table[j], &state.log_pi[j]);
        for (obs, &t) in group.observations.iter().zip(t_j) {
            if p > 0 {
                let psi = &state.psi[j][t];
                terms.local_likelihood += iso_normal_ln_pdf(&obs.local, &psi.mean, psi.var);
            }
            let phi = &state.phi[k_j[t]];
            terms.global_likelihood += iso_normal_ln_pdf(&obs.global, &phi.mean, phi.var);
            terms.local_assignment += log_pi[t];
        }
        terms.table_assignment += k_j.iter().map(|&k| state.log_beta[k]).sum::<f64>();
        if p > 0 {
            terms.local_atom_prior += state.psi[j]
                .iter()
                .map(|a| hyper.nig_local.ln_pdf(a))
                .sum::<f64>();
        }
        terms.local_weight_prior += ln_symmetric_dirichlet_pdf(log_pi, state.alpha);
    }
    terms.global_atom_prior = state.phi.iter().map(|a| hyper.nig_global.ln_pdf(a)).sum();
    terms.global_weight_prior = ln_symmetric_dirichlet_pdf(&state.log_beta, state.gamma);
    terms.alpha_prior = ln_gamma_pdf(state.alpha, hyper.alpha_shape, hyper.alpha_rate);
    terms.gamma_prior = ln_gamma_pdf(state.gamma, hyper.gamma_shape, hyper.gamma_rate);
    Ok(terms)
}

/// Augmented log-likelihood plus log joint prior; see [`LogPosteriorTerms`]
/// for the constant convention.
pub fn log_posterior(
    state: &SamplerState,
    data: &GroupedDataset,
    hyper: &Hyperparams,
    trunc: Truncation,
    mode: Mode,
) -> Result<f64> {
    log_posterior_terms(state, data, hyper, trunc, mode).map(|t| t.total())
}
