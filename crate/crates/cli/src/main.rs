use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glocal::synth::scenario_presets;
use glocal::Mode;
use glocal_cli::commands::{compare, comparison_table, diagnose, diagnostics_text, fit, simulate};
use glocal_cli::{Overrides, Result, RunConfig};

#[derive(Parser)]
#[command(name = "glocal", version, about = "Global-local Dirichlet process mixtures for grouped data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a dataset (CSV manifest or simulated preset) and write point
    /// clusterings, co-clustering matrices and the trace.
    Fit(Common),
    /// Write a simulated dataset with its true labels.
    Simulate(Common),
    /// Fit the global-local model and the HDP to replicates of a preset.
    Compare(Common),
    /// ESS, autocorrelation and R-hat from trace.csv files written by `fit`.
    Diagnose {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the simulation presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Glocal,
    Hdp,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV manifest with columns group,path.
    #[arg(long, conflicts_with = "preset")]
    manifest: Option<PathBuf>,
    /// Simulation preset name (see `glocal presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig> {
        let overrides = Overrides {
            manifest: self.manifest,
            preset: self.preset,
            seed: self.seed,
            mode: self.mode.map(|m| match m {
                ModeArg::Glocal => Mode::Glocal,
                ModeArg::Hdp => Mode::Hdp,
            }),
            out_dir: self.out_dir,
            chains: self.chains,
            replicates: self.replicates,
            iterations: self.iterations,
        };
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(c) => {
            let cfg = c.resolve()?;
            let report = fit(&cfg)?;
            print!("{}", std::fs::read_to_string(report.out_dir.join("summary.txt")).unwrap_or_default());
            println!("wrote {}", report.out_dir.display());
        }
        Command::Simulate(c) => {
            let cfg = c.resolve()?;
            let sim = simulate(&cfg)?;
            println!(
                "wrote {} groups ({} rows) to {}",
                sim.dataset.n_groups(),
                sim.dataset.n_total(),
                cfg.out_dir.display()
            );
        }
        Command::Compare(c) => {
            let cfg = c.resolve()?;
            let rows = compare(&cfg)?;
            print!("{}", comparison_table(&rows));
            println!("wrote {}", cfg.out_dir.join("comparison.csv").display());
        }
        Command::Diagnose { traces, out_dir } => {
            let out = out_dir.unwrap_or_else(|| traces[0].parent().map(PathBuf::from).unwrap_or_default());
            let d = diagnose(&traces, &out)?;
            print!("{}", diagnostics_text(&d));
        }
        Command::Presets => {
            for (name, spec) in scenario_presets() {
                println!(
                    "{name:<26} sizes {:?} local dims {:?} lambda_L {} lambda_G {}",
                    spec.sizes, spec.local_dims, spec.local_precision, spec.global_precision
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
