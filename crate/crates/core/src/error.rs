use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by tree handling, problem construction, modelling and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a primitive set needs at least one terminal pair (l >= 1)")]
    NoTerminalPairs,

    #[error("l = 0 has no minimum tree")]
    ZeroLength,

    #[error("trap group size k must be at least 2, got {0}")]
    TrapGroupTooSmall(usize),

    #[error("trap delta must lie in [0, 1], got {0}")]
    DeltaOutOfRange(f64),

    #[error("l = {l} is not a multiple of the trap group size k = {k}")]
    IndivisibleLength { l: usize, k: usize },

    #[error("trap argument u = {u} outside 0..={k}")]
    UnitationOutOfRange { u: usize, k: usize },

    #[error("primitive {0} is not part of the primitive set")]
    ForeignPrimitive(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("cannot parse tree: {0}")]
    Parse(String),

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot build a model from an empty selection")]
    EmptySelection,

    #[error("population sizing failed: {0}")]
    SizingCeiling(Box<crate::harness::SizingFailure>),

    #[error("nothing to plot: the report has no rows")]
    EmptyReport,

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
