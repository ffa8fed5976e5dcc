use thiserror::Error;

/// Errors produced by the tiling and synthesis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An index or value fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value violates a precondition.
    #[error("configuration error: {0}")]
    Config(String),
    /// The region cannot be covered by dominoes.
    #[error("region is not tileable: {0}")]
    Untileable(String),
    /// A tiling, height field or cluster assignment is internally inconsistent.
    #[error("structural error: {0}")]
    Structural(String),
    /// No admissible placement exists for a partition.
    #[error("infeasible partition {partition}: {reason}")]
    Infeasible { partition: usize, reason: String },
    /// The sampled pattern cannot resolve the main lobe.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
