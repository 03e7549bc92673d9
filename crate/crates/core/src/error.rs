use thiserror::Error;

/// Errors raised by the model, sampler, summaries and diagnostics.
///
/// Group and row indices in messages are 1-based, matching how users number
/// their input files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset has no groups")]
    NoGroups,
    #[error("group {group} is empty")]
    EmptyGroup { group: usize },
    #[error("global dimension must be positive")]
    ZeroGlobalDim,
    #[error("group {group}, row {row}: {what} has length {found}, expected {expected}")]
    RowDimension {
        group: usize,
        row: usize,
        what: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("group {group}, row {row}: non-finite value in {what} column {column}")]
    NonFinite {
        group: usize,
        row: usize,
        what: &'static str,
        column: usize,
    },
    #[error("dimension mismatch: got {found}, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid truncation: need 1 <= L <= T, got L = {global}, T = {local}")]
    InvalidTruncation { global: usize, local: usize },
    #[error("label {label} out of range 1..={max}")]
    LabelOutOfRange { label: usize, max: usize },
    #[error("table counts sum to {found}, expected J*T = {expected}")]
    CountSumMismatch { found: usize, expected: usize },
    #[error("all categorical weights are -inf or NaN")]
    DegenerateWeights,
    #[error("non-finite log target in {0} update")]
    NonFiniteTarget(&'static str),
    #[error("inconsistent sampler state: {0}")]
    InconsistentState(String),
    #[error("invalid chain configuration: {0}")]
    InvalidChainConfig(String),
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("series is constant (zero variance)")]
    ConstantSeries,
    #[error("series too short: {found} values, need at least {needed}")]
    SeriesTooShort { found: usize, needed: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("gelman-rubin needs at least two chains, got {0}")]
    TooFewChains(usize),
    #[error("no posterior draws")]
    NoDraws,
    #[error("weights and atoms were not retained for these draws")]
    AtomsNotRetained,
    #[error("unknown scenario preset {0:?}")]
    UnknownPreset(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
