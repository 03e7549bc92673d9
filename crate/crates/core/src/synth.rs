//! Synthetic grouped datasets with known local and global clusterings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GroupData, GroupedDataset, Observation};
use crate::random::{sample_categorical, sample_dirichlet, sample_gamma, sample_inverse_gamma, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    /// Every group with local variables from its own mixture.
    AllLocal,
    /// Group 1 without local variables.
    NoLocalGroup1,
    /// Fixed four-component 1-d mixture, no local variables.
    Hdp1d,
    /// Only group 1 has a local variable, drawn from a mixture.
    OneLocalInformative,
    /// Only group 1 has a local variable, standard normal noise.
    OneLocalNoise,
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioId::AllLocal => "all_local",
            ScenarioId::NoLocalGroup1 => "no_local_group1",
            ScenarioId::Hdp1d => "hdp_1d",
            ScenarioId::OneLocalInformative => "one_local_informative",
            ScenarioId::OneLocalNoise => "one_local_noise",
        })
    }
}

/// Generative description of a synthetic experiment.
///
/// `local_precision` and `global_precision` are the `lambda` values: atom
/// means are drawn as `N(0, sigma^2 / lambda)`, so smaller values give more
/// separated clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub sizes: Vec<usize>,
    pub local_dims: Vec<usize>,
    pub local_components: Vec<usize>,
    pub global_components: usize,
    pub global_dim: usize,
    pub local_precision: f64,
    pub global_precision: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Three groups of sizes (100, 110, 115), local dims (1, 2, 3), local
    /// component counts (6, 7, 5), 8 global components in two dimensions.
    pub fn all_local(local_precision: f64, global_precision: f64) -> Self {
        Self {
            id: ScenarioId::AllLocal,
            sizes: vec![100, 110, 115],
            local_dims: vec![1, 2, 3],
            local_components: vec![6, 7, 5],
            global_components: 8,
            global_dim: 2,
            local_precision,
            global_precision,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_groups(&self) -> usize {
        self.sizes.len()
    }

    pub fn validate(&self) -> Result<()> {
        let j = self.sizes.len();
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if j == 0 {
            return bad("no groups".into());
        }
        if self.local_dims.len() != j || self.local_components.len() != j {
            return bad(format!(
                "sizes, local_dims and local_components must share length {j}"
            ));
        }
        if self.sizes.contains(&0) || self.local_components.contains(&0) || self.global_components == 0 {
            return bad("sizes and component counts must be at least 1".into());
        }
        if self.global_dim == 0 {
            return bad("global_dim must be positive".into());
        }
        for (name, v) in [("local_precision", self.local_precision), ("global_precision", self.global_precision)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.id == ScenarioId::Hdp1d
            && (self.global_dim != 1 || self.local_dims.iter().any(|&p| p > 0) || j != 3 || self.global_components != 4)
        {
            return bad("hdp_1d is fixed at three 1-d groups with four components and no local variables".into());
        }
        Ok(())
    }
}

/// Per-coordinate Gaussian component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueComponent {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl TrueComponent {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.var)
            .map(|(m, v)| m + v.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    /// Log density of the diagonal Gaussian.
    pub fn ln_pdf(&self, x: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(&self.var)
            .zip(x)
            .map(|((m, v), x)| -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (x - m).powi(2) / v))
            .sum()
    }
}

/// The parameters the data were drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueParams {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Vec<f64>,
    pub pi: Vec<Vec<f64>>,
    pub global_atoms: Vec<TrueComponent>,
    /// Empty for groups without local variables.
    pub local_atoms: Vec<Vec<TrueComponent>>,
    /// Global component of each local component, per group.
    pub k_table: Vec<Vec<usize>>,
}

impl TrueParams {
    /// True global-part mixture density of group `j` at a 1-d point.
    pub fn global_density_1d(&self, j: usize, y: f64) -> f64 {
        self.pi[j]
            .iter()
            .zip(&self.k_table[j])
            .map(|(w, &k)| w * self.global_atoms[k].ln_pdf(&[y]).exp())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub spec: ScenarioSpec,
    pub dataset: GroupedDataset,
    pub true_local_labels: Vec<Vec<usize>>,
    pub true_global_labels: Vec<Vec<usize>>,
    pub params: TrueParams,
}

impl LabeledDataset {
    pub fn concatenated_global_labels(&self) -> Vec<usize> {
        self.true_global_labels.concat()
    }
}

fn draw_component<R: Rng + ?Sized>(dim: usize, precision: f64, rng: &mut R) -> Result<TrueComponent> {
    let mut mean = Vec::with_capacity(dim);
    let mut var = Vec::with_capacity(dim);
    for _ in 0..dim {
        let v = sample_inverse_gamma(2.0, 1.0, rng)?;
        mean.push((v / precision).sqrt() * rng.sample::<f64, _>(StandardNormal));
        var.push(v);
    }
    Ok(TrueComponent { mean, var })
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<usize> {
    let logs: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    sample_categorical(&logs, rng)
}

/// Draws a dataset from `spec` using `rng` (the spec's own `seed` is not
/// consulted; see [`generate_seeded`]).
pub fn generate<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<LabeledDataset> {
    spec.validate()?;
    if spec.id == ScenarioId::Hdp1d {
        let mut out = generate_hdp_1d_sized(spec.sizes.clone(), rng)?;
        out.spec = spec.clone();
        return Ok(out);
    }
    let alpha = sample_gamma(25.0, 1.0, rng)?;
    let gamma = sample_gamma(25.0, 1.0, rng)?;
    let lg = spec.global_components;
    let beta = sample_dirichlet(&vec![gamma / lg as f64; lg], rng)?;
    let global_atoms = (0..lg)
        .map(|_| draw_component(spec.global_dim, spec.global_precision, rng))
        .collect::<Result<Vec<_>>>()?;

    let mut pi = Vec::new();
    let mut local_atoms = Vec::new();
    let mut k_table = Vec::new();
    let mut groups = Vec::new();
    let mut true_local = Vec::new();
    let mut true_global = Vec::new();
    let noise = TrueComponent {
        mean: vec![0.0],
        var: vec![1.0],
    };
    for j in 0..spec.n_groups() {
        let ll = spec.local_components[j];
        let p = spec.local_dims[j];
        let pi_j = sample_dirichlet(&vec![alpha / ll as f64; ll], rng)?;
        let noise_group = spec.id == ScenarioId::OneLocalNoise && p > 0;
        let atoms_j = if p == 0 || noise_group {
            Vec::new()
        } else {
            (0..ll)
                .map(|_| draw_component(p, spec.local_precision, rng))
                .collect::<Result<Vec<_>>>()?
        };
        let k_j = (0..ll).map(|_| sample_index(&beta, rng)).collect::<Result<Vec<_>>>()?;
        let mut obs = Vec::with_capacity(spec.sizes[j]);
        let mut t_labels = Vec::with_capacity(spec.sizes[j]);
        let mut g_labels = Vec::with_capacity(spec.sizes[j]);
        for _ in 0..spec.sizes[j] {
            let t = sample_index(&pi_j, rng)?;
            let local = if p == 0 {
                Vec::new()
            } else if noise_group {
                (0..p).flat_map(|_| noise.sample(rng)).collect()
            } else {
                atoms_j[t].sample(rng)
            };
            let global = global_atoms[k_j[t]].sample(rng);
            obs.push(Observation::new(local, global));
            t_labels.push(t);
            g_labels.push(k_j[t]);
        }
        groups.push(GroupData::new(format!("group{}", j + 1), p, obs));
        pi.push(pi_j);
        local_atoms.push(atoms_j);
        k_table.push(k_j);
        true_local.push(t_labels);
        true_global.push(g_labels);
    }
    Ok(LabeledDataset {
        spec: spec.clone(),
        dataset: GroupedDataset::new(spec.global_dim, groups),
        true_local_labels: true_local,
        true_global_labels: true_global,
        params: TrueParams {
            alpha: Some(alpha),
            gamma: Some(gamma),
            beta,
            pi,
            global_atoms,
            local_atoms,
            k_table,
        },
    })
}

/// [`generate`] with `RngStream::new(spec.seed, 0)`.
pub fn generate_seeded(spec: &ScenarioSpec) -> Result<LabeledDataset> {
    generate(spec, &mut RngStream::new(spec.seed, 0))
}

pub const HDP_1D_MEANS: [f64; 4] = [-6.0, -2.0, 2.0, 6.0];
pub const HDP_1D_WEIGHTS: [[f64; 4]; 3] = [
    [0.5, 0.5, 0.0, 0.0],
    [0.25, 0.25, 0.25, 0.25],
    [0.0, 0.1, 0.6, 0.3],
];

/// Three groups of 100 draws from the fixed four-component 1-d mixture with
/// means (-6, -2, 2, 6) and unit variance.
pub fn generate_hdp_1d<R: Rng + ?Sized>(rng: &mut R) -> Result<LabeledDataset> {
    generate_hdp_1d_sized(vec![100; 3], rng)
}

fn hdp_1d_spec(sizes: Vec<usize>) -> ScenarioSpec {
    ScenarioSpec {
        id: ScenarioId::Hdp1d,
        sizes,
        local_dims: vec![0; 3],
        local_components: vec![4; 3],
        global_components: 4,
        global_dim: 1,
        local_precision: 1.0,
        global_precision: 1.0,
        seed: 0,
    }
}

fn generate_hdp_1d_sized<R: Rng + ?Sized>(sizes: Vec<usize>, rng: &mut R) -> Result<LabeledDataset> {
    let atoms: Vec<TrueComponent> = HDP_1D_MEANS
        .iter()
        .map(|&m| TrueComponent {
            mean: vec![m],
            var: vec![1.0],
        })
        .collect();
    let mut groups = Vec::new();
    let mut labels = Vec::new();
    for (j, &n) in sizes.iter().enumerate() {
        let mut obs = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            let k = sample_index(&HDP_1D_WEIGHTS[j], rng)?;
            obs.push(Observation::new(Vec::new(), atoms[k].sample(rng)));
            z.push(k);
        }
        groups.push(GroupData::new(format!("group{}", j + 1), 0, obs));
        labels.push(z);
    }
    Ok(LabeledDataset {
        spec: hdp_1d_spec(sizes),
        dataset: GroupedDataset::new(1, groups),
        true_local_labels: labels.clone(),
        true_global_labels: labels,
        params: TrueParams {
            alpha: None,
            gamma: None,
            beta: vec![0.25; 4],
            pi: HDP_1D_WEIGHTS.iter().map(|w| w.to_vec()).collect(),
            global_atoms: atoms,
            local_atoms: vec![Vec::new(); 3],
            k_table: vec![(0..4).collect(); 3],
        },
    })
}

/// Named presets.
///
/// | name | lambda_L | lambda_G | local dims |
/// |---|---|---|---|
/// | well_separated | 0.1 | 0.1 | 1, 2, 3 |
/// | moderate | 0.5 | 0.5 | 1, 2, 3 |
/// | hard_global | 0.01 | 1 | 1, 2, 3 |
/// | no_local_group1 | 0.1 | 0.1 | 0, 2, 3 |
/// | high/moderate/low_separation_local | 0.01/0.1/0.5 | 0.5 | 1, 2, 3 |
/// | one_local_informative | 0.1 | 0.1 | 1, 0, 0 |
/// | one_local_noise | - | 0.1 | 1, 0, 0 |
/// | hdp_1d | fixed | fixed | 0, 0, 0 |
pub fn scenario_presets() -> BTreeMap<&'static str, ScenarioSpec> {
    let mut m = BTreeMap::new();
    m.insert("well_separated", ScenarioSpec::all_local(0.1, 0.1));
    m.insert("moderate", ScenarioSpec::all_local(0.5, 0.5));
    m.insert("hard_global", ScenarioSpec::all_local(0.01, 1.0));
    m.insert(
        "no_local_group1",
        ScenarioSpec {
            id: ScenarioId::NoLocalGroup1,
            local_dims: vec![0, 2, 3],
            ..ScenarioSpec::all_local(0.1, 0.1)
        },
    );
    m.insert("high_separation_local", ScenarioSpec::all_local(0.01, 0.5));
    m.insert("moderate_separation_local", ScenarioSpec::all_local(0.1, 0.5));
    m.insert("low_separation_local", ScenarioSpec::all_local(0.5, 0.5));
    m.insert(
        "one_local_informative",
        ScenarioSpec {
            id: ScenarioId::OneLocalInformative,
            local_dims: vec![1, 0, 0],
            local_components: vec![6, 7, 5],
            ..ScenarioSpec::all_local(0.1, 0.1)
        },
    );
    m.insert(
        "one_local_noise",
        ScenarioSpec {
            id: ScenarioId::OneLocalNoise,
            local_dims: vec![1, 0, 0],
            ..ScenarioSpec::all_local(1.0, 0.1)
        },
    );
    m.insert("hdp_1d", hdp_1d_spec(vec![100; 3]));
    m
}

pub fn preset(name: &str) -> Result<ScenarioSpec> {
    scenario_presets()
        .remove(name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        preset(s)
    }
}
