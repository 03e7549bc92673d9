//! CSV input and output.
//!
//! A dataset is a manifest with header `group,path` plus one CSV per group.
//! Paths are relative to the manifest's directory. Each group file has a
//! header of `global_*` columns (same count in every group) and optionally
//! `local_*` columns; the number of local columns is that group's `p_j`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use glocal::{GroupData, GroupedDataset, Observation};

use crate::error::{csv_err, io_err, CliError, Result};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(io_err(path))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

/// Reads one group file. Rows and columns in messages are 1-based, with
/// row 1 the first data row.
pub fn load_group_csv(path: &Path, name: &str) -> Result<(usize, GroupData)> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let mut global_cols = Vec::new();
    let mut local_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if h.starts_with("global") {
            global_cols.push(i);
        } else if h.starts_with("local") {
            local_cols.push(i);
        } else {
            return Err(csv_err(path, format!("column {} ({h:?}) is neither global_* nor local_*", i + 1)));
        }
    }
    if global_cols.is_empty() {
        return Err(csv_err(path, "no global_* columns"));
    }
    let mut observations = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let cell = |c: usize| -> Result<f64> {
            let raw = record.get(c).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                csv_err(path, format!("row {}, column {} ({}): not a number: {raw:?}", r + 1, c + 1, &headers[c]))
            })
        };
        let global = global_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>>>()?;
        let local = local_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>>>()?;
        observations.push(Observation::new(local, global));
    }
    Ok((global_cols.len(), GroupData::new(name, local_cols.len(), observations)))
}

/// Loads every group listed in `manifest` and validates the result.
pub fn load_grouped_csv(manifest: &Path) -> Result<GroupedDataset> {
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut rdr = reader(manifest)?;
    let headers = rdr.headers().map_err(|e| csv_err(manifest, e))?.clone();
    let (gi, pi) = match (
        headers.iter().position(|h| h == "group"),
        headers.iter().position(|h| h == "path"),
    ) {
        (Some(g), Some(p)) => (g, p),
        _ => return Err(csv_err(manifest, "header must contain group and path")),
    };
    let mut groups = Vec::new();
    let mut global_dim = None;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(manifest, e))?;
        let name = record.get(gi).unwrap_or("").to_string();
        let rel = PathBuf::from(record.get(pi).unwrap_or(""));
        let path = if rel.is_relative() { base.join(rel) } else { rel };
        let (d, group) = load_group_csv(&path, &name)?;
        match global_dim {
            None => global_dim = Some(d),
            Some(prev) if prev != d => {
                return Err(csv_err(
                    &path,
                    format!("global dimension mismatch: {d} global columns, earlier groups have {prev}"),
                ));
            }
            _ => {}
        }
        groups.push(group);
    }
    let data = GroupedDataset::new(global_dim.unwrap_or(0), groups);
    data.validate()?;
    Ok(data)
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

pub(crate) fn write_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| csv_err(path, e)
}

/// Writes one group file. `{}` formatting of f64 is the shortest string that
/// parses back to the same value, so files round-trip exactly.
pub fn write_group_csv(path: &Path, global_dim: usize, group: &GroupData) -> Result<()> {
    let mut w = csv_writer(path)?;
    let header: Vec<String> = (1..=global_dim)
        .map(|i| format!("global_{i}"))
        .chain((1..=group.local_dim).map(|i| format!("local_{i}")))
        .collect();
    w.write_record(&header).map_err(write_err(path))?;
    for obs in &group.observations {
        let row: Vec<String> = obs.global.iter().chain(&obs.local).map(|v| v.to_string()).collect();
        w.write_record(&row).map_err(write_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes `<dir>/group_<j>.csv` for each group and `<dir>/manifest.csv`.
/// Returns the manifest path.
pub fn write_grouped_csv(dir: &Path, data: &GroupedDataset) -> Result<PathBuf> {
    let manifest = dir.join("manifest.csv");
    let mut w = csv_writer(&manifest)?;
    w.write_record(["group", "path"]).map_err(write_err(&manifest))?;
    for (j, group) in data.groups.iter().enumerate() {
        let file = format!("group_{}.csv", j + 1);
        write_group_csv(&dir.join(&file), data.global_dim, group)?;
        w.write_record([group.name.as_str(), file.as_str()]).map_err(write_err(&manifest))?;
    }
    w.flush().map_err(io_err(&manifest))?;
    Ok(manifest)
}

/// Writes a square matrix as headerless CSV.
pub fn write_matrix(path: &Path, n: usize, row: impl Fn(usize) -> Vec<f64>) -> Result<()> {
    let mut w = create(path)?;
    for i in 0..n {
        let line: Vec<String> = row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(",")).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
