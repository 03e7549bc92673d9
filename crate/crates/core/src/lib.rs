//! Global-local Dirichlet process mixtures for grouped data.
//!
//! Each observation carries a global part shared by every group and an
//! optional local part specific to its group. A finite-truncation blocked
//! Gibbs sampler clusters the global parts jointly across groups while the
//! local parts refine each group's clusters. With no local parts the model is
//! a hierarchical Dirichlet process mixture.
//!
//! ```no_run
//! use glocal::{gibbs, summary, synth, ChainConfig, Hyperparams, Mode, RngStream, Truncation};
//!
//! let data = synth::generate_seeded(&synth::preset("well_separated")?.with_seed(7))?;
//! let config = ChainConfig::with_iterations(20_000);
//! let draws = gibbs::run_chain(
//!     &data.dataset,
//!     &Hyperparams::default(),
//!     Truncation::new(10, 10)?,
//!     &config,
//!     Mode::Glocal,
//!     &mut RngStream::new(1, 0),
//! )?;
//! let clusters = summary::summarize(&draws)?;
//! println!("{} global clusters", clusters.n_global_clusters);
//! # Ok::<(), glocal::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod gibbs;
pub mod model;
pub mod random;
pub mod summary;
pub mod synth;

pub use error::{Error, Result};
pub use gibbs::{run_chain, run_chains, ChainConfig, InitPolicy};
pub use model::{
    log_density_global, log_density_local, log_posterior, log_posterior_terms, validate_dataset, Atom, GroupData,
    GroupedDataset, Hyperparams, LogPosteriorTerms, Mode, NigPrior, Observation, PriorMean, SamplerState, Truncation,
};
pub use random::RngStream;
pub use summary::{summarize, ClusteringResult, PosteriorDraws};
