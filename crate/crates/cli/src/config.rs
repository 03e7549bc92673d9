//! Run configuration: a TOML file plus command-line overrides.
//!
//! Precedence is flags, then file, then defaults. Defaults: L = T = 20,
//! IG(0.1, 0.1) variance priors with unit prior precision, Gamma(0.1, 0.1)
//! concentration priors, 20 000 iterations with a quarter burned in and
//! thinning that keeps about 1000 draws.

use std::path::{Path, PathBuf};

use glocal::{ChainConfig, Hyperparams, InitPolicy, Mode, Truncation};
use serde::Deserialize;

use crate::error::{io_err, CliError, Result};

/// Chain settings as written in the file. Unset `burn_in` and `thin` follow
/// `iterations`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub n_chains: Option<usize>,
    pub init: Option<InitPolicy>,
    pub retain_atoms: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub manifest: Option<PathBuf>,
    pub preset: Option<String>,
    pub seed: u64,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub replicates: usize,
    pub truncation: Truncation,
    pub chain: ChainSection,
    pub priors: Hyperparams,
}

impl Default for FileConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            preset: None,
            seed: 1,
            mode: Mode::Glocal,
            out_dir: PathBuf::from("glocal-out"),
            replicates: 20,
            truncation: Truncation::default(),
            chain: ChainSection::default(),
            priors: Hyperparams::default(),
        }
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub manifest: Option<PathBuf>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub out_dir: Option<PathBuf>,
    pub chains: Option<usize>,
    pub replicates: Option<usize>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Manifest(PathBuf),
    Preset(String),
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Option<DataSource>,
    pub seed: u64,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub replicates: usize,
    pub truncation: Truncation,
    pub chain: ChainConfig,
    pub hyper: Hyperparams,
}

impl RunConfig {
    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::resolve(file, overrides, None)
    }

    /// Reads `path` (if given) and applies `overrides`. A relative manifest
    /// path in the file is taken relative to the file.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        match path {
            None => Self::resolve(FileConfig::default(), overrides, None),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(io_err(p))?;
                let file: FileConfig =
                    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::resolve(file, overrides, p.parent())
            }
        }
    }

    fn resolve(file: FileConfig, o: &Overrides, base: Option<&Path>) -> Result<Self> {
        let file_manifest = file.manifest.map(|m| match base {
            Some(b) if m.is_relative() => b.join(m),
            _ => m,
        });
        // a flag for either source replaces whatever the file named
        let (manifest, preset) = if o.manifest.is_some() || o.preset.is_some() {
            (o.manifest.clone(), o.preset.clone())
        } else {
            (file_manifest, file.preset)
        };
        let source = match (manifest, preset) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either a manifest or a preset, not both".into()));
            }
            (Some(m), None) => Some(DataSource::Manifest(m)),
            (None, Some(p)) => Some(DataSource::Preset(p)),
            (None, None) => None,
        };

        let c = &file.chain;
        let iterations = o.iterations.or(c.iterations).unwrap_or(20_000);
        let mut chain = ChainConfig::with_iterations(iterations);
        if let Some(b) = c.burn_in {
            chain.burn_in = b;
            if c.thin.is_none() {
                chain.thin = (iterations.saturating_sub(b) / 1000).max(1);
            }
        }
        if let Some(t) = c.thin {
            chain.thin = t;
        }
        chain.n_chains = o.chains.or(c.n_chains).unwrap_or(1);
        chain.init = c.init.unwrap_or_default();
        chain.retain_atoms = c.retain_atoms.unwrap_or(false);
        chain.validate()?;
        file.truncation.validate()?;
        file.priors.validate()?;

        let replicates = o.replicates.unwrap_or(file.replicates);
        if replicates == 0 {
            return Err(CliError::Config("replicates must be at least 1".into()));
        }
        Ok(Self {
            source,
            seed: o.seed.unwrap_or(file.seed),
            mode: o.mode.unwrap_or(file.mode),
            out_dir: o.out_dir.clone().unwrap_or(file.out_dir),
            replicates,
            truncation: file.truncation,
            chain,
            hyper: file.priors,
        })
    }

    pub fn preset_name(&self) -> Result<&str> {
        match &self.source {
            Some(DataSource::Preset(p)) => Ok(p),
            _ => Err(CliError::Config("this command needs a scenario preset".into())),
        }
    }
}
