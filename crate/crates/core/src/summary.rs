//! Posterior summaries: co-clustering matrices, least-squares point
//! clustering over the retained draws, and posterior density grids.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{iso_normal_ln_pdf, Atom, Mode, Truncation};

/// Weights and atoms of a retained draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawParams {
    pub log_beta: Vec<f64>,
    pub log_pi: Vec<Vec<f64>>,
    pub phi: Vec<Atom>,
    pub psi: Vec<Vec<Atom>>,
}

/// One retained posterior sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    /// 1-based sweep number the draw was taken after.
    pub iteration: usize,
    pub t_labels: Vec<Vec<usize>>,
    pub k_table: Vec<Vec<usize>>,
    pub alpha: f64,
    pub gamma: f64,
    pub log_posterior: f64,
    pub params: Option<DrawParams>,
}

/// Scalars recorded after every sweep, burn-in included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub log_posterior: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub alpha_accepted: bool,
    pub gamma_accepted: bool,
}

/// Output of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub mode: Mode,
    pub truncation: Truncation,
    pub group_sizes: Vec<usize>,
    /// Local dimensions the sampler used (all zero in HDP mode).
    pub local_dims: Vec<usize>,
    pub draws: Vec<Draw>,
    pub trace: Vec<IterationStats>,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Concatenated global labels of every retained draw.
    pub fn global_label_sequences(&self) -> Vec<Vec<usize>> {
        self.draws.iter().map(derive_global_labels).collect()
    }

    pub fn local_label_sequences(&self, group: usize) -> Vec<Vec<usize>> {
        self.draws.iter().map(|d| d.t_labels[group].clone()).collect()
    }

    pub fn log_posterior_series(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.log_posterior).collect()
    }

    pub fn alpha_series(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.alpha).collect()
    }

    pub fn gamma_series(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.gamma).collect()
    }
}

/// Global label `k_{j, t_ji}` of every observation, groups concatenated in
/// order.
pub fn derive_global_labels(draw: &Draw) -> Vec<usize> {
    draw.t_labels
        .iter()
        .zip(&draw.k_table)
        .flat_map(|(t, k)| t.iter().map(move |&ti| k[ti]))
        .collect()
}

/// Dense symmetric co-clustering probability matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoclusteringMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CoclusteringMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Sub-matrix over a contiguous index range.
    pub fn block(&self, range: std::ops::Range<usize>) -> CoclusteringMatrix {
        let m = range.len();
        let mut values = Vec::with_capacity(m * m);
        for i in range.clone() {
            values.extend_from_slice(&self.row(i)[range.clone()]);
        }
        CoclusteringMatrix { n: m, values }
    }
}

fn check_lengths(sequences: &[Vec<usize>]) -> Result<usize> {
    let first = sequences.first().ok_or(Error::NoDraws)?;
    let n = first.len();
    if let Some(s) = sequences.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: s.len(),
        });
    }
    Ok(n)
}

/// `P_ij = (1/M) sum_b 1(z_i^(b) = z_j^(b))`.
pub fn coclustering_matrix(sequences: &[Vec<usize>]) -> Result<CoclusteringMatrix> {
    let n = check_lengths(sequences)?;
    let mut counts = vec![0u32; n * n];
    for z in sequences {
        for i in 0..n {
            let row = &mut counts[i * n..(i + 1) * n];
            let zi = z[i];
            for (j, c) in row.iter_mut().enumerate().skip(i + 1) {
                if z[j] == zi {
                    *c += 1;
                }
            }
        }
    }
    let m = sequences.len() as f64;
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let p = counts[i * n + j] as f64 / m;
            values[i * n + j] = p;
            values[j * n + i] = p;
        }
    }
    Ok(CoclusteringMatrix { n, values })
}

/// Squared distance between `delta(z)` and the co-clustering matrix over
/// unordered pairs `i < j`. The diagonal contributes nothing for any `z`.
pub fn least_squares_loss(z: &[usize], pi: &CoclusteringMatrix) -> f64 {
    let n = z.len();
    let mut loss = 0.0;
    for i in 0..n {
        let row = pi.row(i);
        for j in i + 1..n {
            let delta = if z[i] == z[j] { 1.0 } else { 0.0 };
            loss += (delta - row[j]).powi(2);
        }
    }
    loss
}

/// Retained draw closest to the co-clustering matrix in squared distance.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresChoice {
    pub index: usize,
    pub labels: Vec<usize>,
    pub loss: f64,
    pub losses: Vec<f64>,
}

/// Least-squares clustering over the sampled partitions. Ties go to the
/// earliest draw.
pub fn least_squares_clustering(sequences: &[Vec<usize>]) -> Result<LeastSquaresChoice> {
    let pi = coclustering_matrix(sequences)?;
    let losses: Vec<f64> = sequences.iter().map(|z| least_squares_loss(z, &pi)).collect();
    let mut index = 0;
    for (b, &l) in losses.iter().enumerate() {
        if l < losses[index] {
            index = b;
        }
    }
    Ok(LeastSquaresChoice {
        index,
        labels: sequences[index].clone(),
        loss: losses[index],
        losses,
    })
}

pub fn count_distinct(labels: &[usize]) -> usize {
    labels.iter().collect::<BTreeSet<_>>().len()
}

/// Point estimate of the local-level clustering of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalClustering {
    pub labels: Vec<usize>,
    pub chosen_draw_index: usize,
    pub n_clusters: usize,
}

/// Least-squares global labels across all groups plus per-group local labels.
///
/// `local` is `None` for groups the sampler fitted without local variables;
/// such groups have no local-level clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Concatenated over groups in order.
    pub global_labels: Vec<usize>,
    pub chosen_draw_index: usize,
    pub n_global_clusters: usize,
    pub local: Vec<Option<LocalClustering>>,
    pub group_sizes: Vec<usize>,
}

impl ClusteringResult {
    /// Global labels of one group.
    pub fn group_global_labels(&self, group: usize) -> &[usize] {
        let start: usize = self.group_sizes[..group].iter().sum();
        &self.global_labels[start..start + self.group_sizes[group]]
    }

    /// Total local clusters over groups that have them.
    pub fn n_local_clusters(&self) -> usize {
        self.local.iter().flatten().map(|l| l.n_clusters).sum()
    }
}

pub fn summarize(draws: &PosteriorDraws) -> Result<ClusteringResult> {
    if draws.is_empty() {
        return Err(Error::NoDraws);
    }
    let global = least_squares_clustering(&draws.global_label_sequences())?;
    let local = draws
        .local_dims
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            if p == 0 {
                return Ok(None);
            }
            let choice = least_squares_clustering(&draws.local_label_sequences(j))?;
            Ok(Some(LocalClustering {
                n_clusters: count_distinct(&choice.labels),
                chosen_draw_index: choice.index,
                labels: choice.labels,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusteringResult {
        n_global_clusters: count_distinct(&global.labels),
        chosen_draw_index: global.index,
        global_labels: global.labels,
        local,
        group_sizes: draws.group_sizes.clone(),
    })
}

/// `n` equidistant points spanning `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + h * i as f64).collect()
        }
    }
}

/// Posterior-mean mixture density `sum_t pi_jt f2(y | phi_{k_jt})` of group
/// `j` at each grid point, for one-dimensional global data.
pub fn posterior_density_grid(draws: &PosteriorDraws, group: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if draws.is_empty() {
        return Err(Error::NoDraws);
    }
    let mut density = vec![0.0; grid.len()];
    for draw in &draws.draws {
        let params = draw.params.as_ref().ok_or(Error::AtomsNotRetained)?;
        let dim = params.phi.first().map_or(0, Atom::dim);
        if dim != 1 {
            return Err(Error::DimensionMismatch {
                found: dim,
                expected: 1,
            });
        }
        for (t, &lp) in params.log_pi[group].iter().enumerate() {
            let atom = &params.phi[draw.k_table[group][t]];
            for (d, &y) in density.iter_mut().zip(grid) {
                *d += (lp + iso_normal_ln_pdf(&[y], &atom.mean, atom.var)).exp();
            }
        }
    }
    let m = draws.len() as f64;
    density.iter_mut().for_each(|d| *d /= m);
    Ok(density)
}
