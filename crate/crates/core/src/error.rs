use thiserror::Error;

use crate::temporal::Variant;

/// Errors raised anywhere in the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("line {line}: record {record:?}: field `{field}`: {reason}")]
    Validation {
        line: u64,
        record: String,
        field: String,
        reason: String,
    },

    #[error("line {line}: cannot parse `{field}`: {reason}")]
    Parse { line: u64, field: String, reason: String },

    #[error("gauge-degenerate: {0}")]
    GaugeDegenerate(String),

    #[error("kinetic-energy form unavailable: {0}")]
    FormUnavailable(String),

    #[error("double-exponential overflow: inner exponent {exponent} exceeds 700 at year {year}")]
    Overflow { year: f64, exponent: f64 },

    #[error("degenerate fit: rank-deficient design, collinear columns: {}", columns.join(", "))]
    Degenerate { columns: Vec<String> },

    #[error("no feasible fit: {0}")]
    NoFeasibleFit(String),

    #[error("insufficient data: {needed} records required, {got} available")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("R² undefined: observed values have zero variance")]
    UndefinedRSquared,

    #[error("MAPE undefined: observed value at index {index} is zero")]
    ZeroObserved { index: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("hindcast window {index} (cutoff {cutoff}): {source}")]
    Window {
        index: usize,
        cutoff: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("all variants failed: {}", describe_failures(.0))]
    AllVariantsFailed(Vec<(Variant, Error)>),
}

fn describe_failures(failures: &[(Variant, Error)]) -> String {
    failures
        .iter()
        .map(|(v, e)| format!("{v}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// True for errors caused by the fit itself (degenerate designs, no feasible
    /// parameters) rather than by malformed input.
    pub fn is_fit_failure(&self) -> bool {
        match self {
            Error::Degenerate { .. } | Error::NoFeasibleFit(_) | Error::GaugeDegenerate(_) | Error::Overflow { .. } => {
                true
            }
            Error::Window { source, .. } => source.is_fit_failure(),
            Error::AllVariantsFailed(failures) => failures.iter().all(|(_, e)| e.is_fit_failure()),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
