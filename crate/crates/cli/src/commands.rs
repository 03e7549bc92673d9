//! The `fit`, `simulate`, `compare` and `diagnose` commands.
//!
//! Labels in every output file are 1-based. Cluster ids are renumbered in
//! order of first appearance so that equal partitions print identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use glocal::diagnostics::{adjusted_rand_index, autocorrelation, effective_sample_size, gelman_rubin};
use glocal::random::derive_seed;
use glocal::summary::coclustering_matrix;
use glocal::synth::{generate, preset, LabeledDataset};
use glocal::{
    run_chains, summarize, ClusteringResult, GroupedDataset, Mode, PosteriorDraws, RngStream,
};
use rayon::prelude::*;

use crate::config::{DataSource, RunConfig};
use crate::error::{csv_err, io_err, CliError, Result};
use crate::io::{create, csv_writer, load_grouped_csv, write_err, write_grouped_csv, write_matrix};

/// Seed of the synthetic dataset for `replicate` under user seed `seed`.
/// Kept apart from the chain streams so data and chain 0 never share draws.
pub fn data_seed(seed: u64, replicate: u64) -> u64 {
    derive_seed(seed, 2 * replicate + 1)
}

/// Chain seed for `replicate` in `compare`.
pub fn chain_seed(seed: u64, replicate: u64) -> u64 {
    derive_seed(seed, 2 * replicate + 2)
}

pub fn simulate_replicate(name: &str, seed: u64, replicate: u64) -> Result<LabeledDataset> {
    let spec = preset(name)?.with_seed(data_seed(seed, replicate));
    Ok(generate(&spec, &mut RngStream::new(spec.seed, 0))?)
}

/// Renumbers labels 1, 2, ... in order of first appearance.
pub fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len() + 1;
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn load_data(cfg: &RunConfig) -> Result<(GroupedDataset, Option<LabeledDataset>)> {
    match &cfg.source {
        Some(DataSource::Manifest(m)) => Ok((load_grouped_csv(m)?, None)),
        Some(DataSource::Preset(p)) => {
            let sim = simulate_replicate(p, cfg.seed, 0)?;
            Ok((sim.dataset.clone(), Some(sim)))
        }
        None => Err(CliError::Config("no data: give --manifest or --preset".into())),
    }
}

/// Draws of all chains in one set, for co-clustering and point estimates.
pub fn pool(chains: &[PosteriorDraws]) -> PosteriorDraws {
    let mut pooled = chains[0].clone();
    pooled.trace.clear();
    for c in &chains[1..] {
        pooled.draws.extend(c.draws.iter().cloned());
    }
    pooled
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sd(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0).max(1.0)).sqrt()
}

/// R-hat of the retained log-posterior values; `None` for a single chain.
pub fn rhat_log_posterior(chains: &[PosteriorDraws]) -> Result<Option<f64>> {
    if chains.len() < 2 {
        return Ok(None);
    }
    let series: Vec<Vec<f64>> = chains.iter().map(PosteriorDraws::log_posterior_series).collect();
    let refs: Vec<&[f64]> = series.iter().map(Vec::as_slice).collect();
    Ok(Some(gelman_rubin(&refs)?))
}

pub struct FitReport {
    pub chains: Vec<PosteriorDraws>,
    pub clustering: ClusteringResult,
    pub rhat: Option<f64>,
    pub out_dir: PathBuf,
}

pub fn fit(cfg: &RunConfig) -> Result<FitReport> {
    let (data, _) = load_data(cfg)?;
    let chains = run_chains(&data, &cfg.hyper, cfg.truncation, &cfg.chain, cfg.mode, cfg.seed)?;
    let pooled = pool(&chains);
    let clustering = summarize(&pooled)?;
    let rhat = rhat_log_posterior(&chains)?;
    let out = &cfg.out_dir;
    std::fs::create_dir_all(out).map_err(io_err(out))?;

    write_assignments(&out.join("assignments.csv"), &data, &clustering)?;
    let global = coclustering_matrix(&pooled.global_label_sequences())?;
    write_matrix(&out.join("coclust_global.csv"), global.n(), |i| global.row(i).to_vec())?;
    for (j, local) in clustering.local.iter().enumerate() {
        if local.is_some() {
            let m = coclustering_matrix(&pooled.local_label_sequences(j))?;
            write_matrix(&out.join(format!("coclust_local_{}.csv", j + 1)), m.n(), |i| m.row(i).to_vec())?;
        }
    }
    write_trace(&out.join("trace.csv"), &chains)?;
    let summary = summary_text(cfg, &data, &chains, &clustering, rhat)?;
    let path = out.join("summary.txt");
    create(&path)?.write_all(summary.as_bytes()).map_err(io_err(&path))?;
    Ok(FitReport {
        chains,
        clustering,
        rhat,
        out_dir: out.clone(),
    })
}

fn write_assignments(path: &Path, data: &GroupedDataset, c: &ClusteringResult) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["group", "row", "global_cluster", "local_cluster"])
        .map_err(write_err(path))?;
    let global = relabel(&c.global_labels);
    let mut offset = 0;
    for (j, group) in data.groups.iter().enumerate() {
        let local = c.local[j].as_ref().map(|l| relabel(&l.labels));
        for i in 0..group.len() {
            let l = local.as_ref().map_or(String::new(), |l| l[i].to_string());
            w.write_record([group.name.clone(), (i + 1).to_string(), global[offset + i].to_string(), l])
                .map_err(write_err(path))?;
        }
        offset += group.len();
    }
    w.flush().map_err(io_err(path))
}

fn write_trace(path: &Path, chains: &[PosteriorDraws]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["iteration", "chain", "log_posterior", "alpha", "gamma", "n_global_clusters"])
        .map_err(write_err(path))?;
    for (c, chain) in chains.iter().enumerate() {
        for (draw, labels) in chain.draws.iter().zip(chain.global_label_sequences()) {
            w.write_record([
                draw.iteration.to_string(),
                (c + 1).to_string(),
                draw.log_posterior.to_string(),
                draw.alpha.to_string(),
                draw.gamma.to_string(),
                glocal::summary::count_distinct(&labels).to_string(),
            ])
            .map_err(write_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn acceptance_rate(flags: impl Iterator<Item = bool>) -> f64 {
    let (mut n, mut a) = (0usize, 0usize);
    for f in flags {
        n += 1;
        a += usize::from(f);
    }
    a as f64 / n.max(1) as f64
}

fn summary_text(
    cfg: &RunConfig,
    data: &GroupedDataset,
    chains: &[PosteriorDraws],
    c: &ClusteringResult,
    rhat: Option<f64>,
) -> Result<String> {
    let mut s = String::new();
    let mode = match cfg.mode {
        Mode::Glocal => "glocal",
        Mode::Hdp => "hdp",
    };
    let _ = writeln!(s, "mode: {mode}");
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "truncation: L = {}, T = {}", cfg.truncation.global, cfg.truncation.local);
    let _ = writeln!(
        s,
        "iterations: {} (burn-in {}, thin {}), {} chain(s) x {} retained draws",
        cfg.chain.iterations,
        cfg.chain.burn_in,
        cfg.chain.thin,
        chains.len(),
        chains[0].len()
    );
    let _ = writeln!(s, "global clusters: {}", c.n_global_clusters);
    for (j, group) in data.groups.iter().enumerate() {
        match &c.local[j] {
            Some(l) => {
                let _ = writeln!(s, "local clusters, {}: {}", group.name, l.n_clusters);
            }
            None => {
                let _ = writeln!(s, "local clusters, {}: none (no local variables)", group.name);
            }
        }
    }
    for (k, chain) in chains.iter().enumerate() {
        let lp = chain.log_posterior_series();
        let ess = effective_sample_size(&lp).map_or("n/a".to_string(), |e| format!("{e:.1}"));
        let _ = writeln!(
            s,
            "chain {}: mean log posterior {:.3}, ESS {}, mean alpha {:.4}, mean gamma {:.4}, MH acceptance alpha {:.3} gamma {:.3}",
            k + 1,
            mean(&lp),
            ess,
            mean(&chain.alpha_series()),
            mean(&chain.gamma_series()),
            acceptance_rate(chain.trace.iter().map(|t| t.alpha_accepted)),
            acceptance_rate(chain.trace.iter().map(|t| t.gamma_accepted)),
        );
    }
    if let Some(r) = rhat {
        let _ = writeln!(s, "R-hat (log posterior): {r:.4}");
    }
    Ok(s)
}

/// Writes the simulated dataset of replicate 1, its manifest and truth.csv.
pub fn simulate(cfg: &RunConfig) -> Result<LabeledDataset> {
    let sim = simulate_replicate(cfg.preset_name()?, cfg.seed, 0)?;
    let out = &cfg.out_dir;
    write_grouped_csv(out, &sim.dataset)?;
    let path = out.join("truth.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["group", "row", "local_cluster", "global_cluster"])
        .map_err(write_err(&path))?;
    for (j, group) in sim.dataset.groups.iter().enumerate() {
        for i in 0..group.len() {
            w.write_record([
                group.name.clone(),
                (i + 1).to_string(),
                (sim.true_local_labels[j][i] + 1).to_string(),
                (sim.true_global_labels[j][i] + 1).to_string(),
            ])
            .map_err(write_err(&path))?;
        }
    }
    w.flush().map_err(io_err(&path))?;
    Ok(sim)
}

/// One method on one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub replicate: usize,
    pub mode: Mode,
    pub ari_global: f64,
    /// `None` where the group has no fitted local clustering.
    pub ari_local: Vec<Option<f64>>,
    pub n_global_clusters: usize,
    pub ess_log_posterior: f64,
}

fn score(sim: &LabeledDataset, draws: &[PosteriorDraws], replicate: usize, mode: Mode) -> Result<ComparisonRow> {
    let c = summarize(&pool(draws))?;
    let ari_global = adjusted_rand_index(&c.global_labels, &sim.concatenated_global_labels())?;
    let ari_local = c
        .local
        .iter()
        .zip(&sim.true_local_labels)
        .map(|(l, truth)| l.as_ref().map(|l| adjusted_rand_index(&l.labels, truth)).transpose())
        .collect::<glocal::Result<Vec<_>>>()?;
    let ess = effective_sample_size(&draws[0].log_posterior_series()).unwrap_or(f64::NAN);
    Ok(ComparisonRow {
        replicate,
        mode,
        ari_global,
        ari_local,
        n_global_clusters: c.n_global_clusters,
        ess_log_posterior: ess,
    })
}

/// Fits both the global-local model and the HDP to each replicate of a
/// preset and scores them against the true labels.
pub fn compare(cfg: &RunConfig) -> Result<Vec<ComparisonRow>> {
    let name = cfg.preset_name()?.to_string();
    let rows: Vec<Vec<ComparisonRow>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let sim = simulate_replicate(&name, cfg.seed, r as u64)?;
            let seed = chain_seed(cfg.seed, r as u64);
            [Mode::Glocal, Mode::Hdp]
                .into_iter()
                .map(|mode| {
                    let draws = run_chains(&sim.dataset, &cfg.hyper, cfg.truncation, &cfg.chain, mode, seed)?;
                    score(&sim, &draws, r + 1, mode)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ComparisonRow> = rows.into_iter().flatten().collect();
    write_comparison(&cfg.out_dir.join("comparison.csv"), &rows)?;
    Ok(rows)
}

fn write_comparison(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let n_groups = rows.first().map_or(0, |r| r.ari_local.len());
    let mut w = csv_writer(path)?;
    let mut header = vec!["replicate".to_string(), "method".to_string(), "ari_global".to_string()];
    header.extend((1..=n_groups).map(|j| format!("ari_local_{j}")));
    header.extend(["n_global_clusters".to_string(), "ess_logpost".to_string()]);
    w.write_record(&header).map_err(write_err(path))?;
    for r in rows {
        let mut rec = vec![
            r.replicate.to_string(),
            method_name(r.mode).to_string(),
            r.ari_global.to_string(),
        ];
        rec.extend(r.ari_local.iter().map(|a| a.map_or(String::new(), |v| v.to_string())));
        rec.push(r.n_global_clusters.to_string());
        rec.push(r.ess_log_posterior.to_string());
        w.write_record(&rec).map_err(write_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn method_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Glocal => "glocal",
        Mode::Hdp => "hdp",
    }
}

/// `mean +- sd` of the global ARI per method, one line each.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let mut s = String::new();
    for mode in [Mode::Glocal, Mode::Hdp] {
        let ari: Vec<f64> = rows.iter().filter(|r| r.mode == mode).map(|r| r.ari_global).collect();
        if ari.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            "{:<7} global ARI {:.3} +- {:.3} over {} replicates",
            method_name(mode),
            mean(&ari),
            sd(&ari),
            ari.len()
        );
    }
    s
}

/// Monitored scalars in a trace file.
pub const TRACE_QUANTITIES: [&str; 3] = ["log_posterior", "alpha", "gamma"];

/// One chain's series from a trace file, one vector per quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceChain {
    pub label: String,
    pub series: [Vec<f64>; 3],
}

/// Reads every chain of a `trace.csv` as written by `fit`.
pub fn read_trace(path: &Path) -> Result<Vec<TraceChain>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| csv_err(path, format!("missing column {name}")))
    };
    let ci = col("chain")?;
    let cols = [col(TRACE_QUANTITIES[0])?, col(TRACE_QUANTITIES[1])?, col(TRACE_QUANTITIES[2])?];
    let mut chains: BTreeMap<usize, [Vec<f64>; 3]> = BTreeMap::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let chain = rec
            .get(ci)
            .unwrap_or("")
            .parse::<usize>()
            .map_err(|_| csv_err(path, format!("row {}: bad chain id", r + 1)))?;
        let entry = chains.entry(chain).or_default();
        for (k, &c) in cols.iter().enumerate() {
            let v = rec.get(c).unwrap_or("").parse::<f64>().map_err(|_| {
                csv_err(path, format!("row {}, column {}: not a number", r + 1, c + 1))
            })?;
            entry[k].push(v);
        }
    }
    if chains.is_empty() {
        return Err(csv_err(path, "no rows"));
    }
    Ok(chains
        .into_iter()
        .map(|(id, series)| TraceChain {
            label: format!("{}#{id}", path.display()),
            series,
        })
        .collect())
}

/// Per-quantity diagnostics over all chains.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantityDiagnostics {
    pub name: &'static str,
    /// ESS per chain; NaN for a constant series.
    pub ess: Vec<f64>,
    /// Autocorrelation per chain at lags `0..=min(50, n - 1)`; empty for a
    /// constant series.
    pub acf: Vec<Vec<f64>>,
    /// `None` for a single chain, chains of unequal length or constant
    /// series.
    pub rhat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub chains: Vec<String>,
    pub quantities: Vec<QuantityDiagnostics>,
}

pub fn diagnose_chains(chains: &[TraceChain]) -> Diagnostics {
    let quantities = TRACE_QUANTITIES
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let series: Vec<&[f64]> = chains.iter().map(|c| c.series[k].as_slice()).collect();
            QuantityDiagnostics {
                name,
                ess: series.iter().map(|s| effective_sample_size(s).unwrap_or(f64::NAN)).collect(),
                acf: series
                    .iter()
                    .map(|s| autocorrelation(s, 50.min(s.len().saturating_sub(1))).unwrap_or_default())
                    .collect(),
                rhat: gelman_rubin(&series).ok(),
            }
        })
        .collect();
    Diagnostics {
        chains: chains.iter().map(|c| c.label.clone()).collect(),
        quantities,
    }
}

/// Reads the trace files, writes `acf.csv` and `diagnostics.txt` into
/// `out_dir`.
pub fn diagnose(traces: &[PathBuf], out_dir: &Path) -> Result<Diagnostics> {
    if traces.is_empty() {
        return Err(CliError::Config("diagnose needs at least one trace file".into()));
    }
    let mut chains = Vec::new();
    for t in traces {
        chains.extend(read_trace(t)?);
    }
    let d = diagnose_chains(&chains);

    let path = out_dir.join("acf.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["chain", "quantity", "lag", "acf"]).map_err(write_err(&path))?;
    for q in &d.quantities {
        for (label, acf) in d.chains.iter().zip(&q.acf) {
            for (lag, v) in acf.iter().enumerate().skip(1) {
                w.write_record([label.as_str(), q.name, &lag.to_string(), &v.to_string()])
                    .map_err(write_err(&path))?;
            }
        }
    }
    w.flush().map_err(io_err(&path))?;

    let path = out_dir.join("diagnostics.txt");
    create(&path)?.write_all(diagnostics_text(&d).as_bytes()).map_err(io_err(&path))?;
    Ok(d)
}

pub fn diagnostics_text(d: &Diagnostics) -> String {
    let mut s = String::new();
    for q in &d.quantities {
        let _ = writeln!(s, "{}:", q.name);
        for (label, e) in d.chains.iter().zip(&q.ess) {
            let _ = writeln!(s, "  {label}: ESS {e:.1}");
        }
        match q.rhat {
            Some(r) => {
                let _ = writeln!(s, "  R-hat {r:.4}");
            }
            None if d.chains.len() < 2 => {
                let _ = writeln!(s, "  R-hat omitted: needs at least two chains");
            }
            None => {
                let _ = writeln!(s, "  R-hat omitted: chains differ in length or are constant");
            }
        }
    }
    s
}
