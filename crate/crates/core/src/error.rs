use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient residual degrees of freedom for {block}: n = {n}, rank = {rank}")]
    InsufficientDf { block: String, n: usize, rank: usize },

    #[error("empty margins: zero-sum rows {rows:?}, zero-sum columns {cols:?}")]
    EmptyMargins { rows: Vec<usize>, cols: Vec<usize> },

    #[error("all relative abundances vanished at site {site} after {attempts} redraws")]
    SiteRedrawExhausted { site: usize, attempts: usize },

    #[error("bootstrap failure rate {failed}/{requested} exceeds the 5% budget (last error: {last})")]
    BootstrapFailureRate {
        failed: usize,
        requested: usize,
        last: String,
    },

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
}

impl Error {
    /// True when the error stems from malformed input rather than a numerical
    /// degeneracy in otherwise valid data.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::DimensionMismatch(_) | Error::NonFinite { .. } | Error::InvalidInput(_) => true,
            Error::Replicate { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
