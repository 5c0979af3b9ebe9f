use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Hamiltonian has no nonzero terms")]
    EmptyHamiltonian,

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("size guard exceeded for {what}: {actual} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    ConvergenceFailure { residual: f64, iterations: usize },

    #[error("initial state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("moment sequence length {found} does not match 2*D = {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("every overlap eigenvalue is at or below threshold {epsilon:e} (largest {largest:e})")]
    AllDiscarded { epsilon: f64, largest: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("bound denominator is not positive: gamma0 = {gamma0}, 2*sqrt((k+1)*eps) = {offset}")]
    DenominatorInvalid { gamma0: f64, offset: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used in CSV error columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyHamiltonian => "empty_hamiltonian",
            Error::QubitMismatch { .. } => "qubit_mismatch",
            Error::Parse { .. } => "parse_error",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SizeGuard { .. } => "size_guard",
            Error::ConvergenceFailure { .. } => "convergence_failure",
            Error::NotNormalized { .. } => "not_normalized",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::AllDiscarded { .. } => "all_discarded",
            Error::EmptyInput => "empty_input",
            Error::DenominatorInvalid { .. } => "denominator_invalid",
            Error::Domain(_) => "domain_error",
            Error::Config(_) => "config_error",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
            Error::Csv(_) => "csv_error",
        }
    }

    /// Errors caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Config(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::QubitMismatch { .. }
                | Error::SizeGuard { .. }
        )
    }
}
