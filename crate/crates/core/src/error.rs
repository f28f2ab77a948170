use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    /// The selected columns are numerically rank deficient (or outnumber the rows).
    #[error("singular projection onto {columns} columns{}", iteration_suffix(*.iteration))]
    SingularProjection {
        columns: usize,
        iteration: Option<usize>,
    },

    #[error("selection width {selected} exceeds the {rows} available measurements")]
    UnstableWidth { selected: usize, rows: usize },

    #[error("iterative thresholding diverged at iteration {iteration}: residual {residual_norm:.3e} > 10 x {measurement_norm:.3e}")]
    Diverged {
        iteration: usize,
        residual_norm: f64,
        measurement_norm: f64,
    },

    #[error("{subsets} subsets exceed the enumeration budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u64 },

    #[error("restricted isometry constant of order {order} is not available")]
    OrderOutOfRange { order: usize },

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

fn iteration_suffix(iteration: Option<usize>) -> String {
    match iteration {
        Some(t) => format!(" at iteration {t}"),
        None => String::new(),
    }
}

impl Error {
    /// Short machine-readable tag, used in CSV stop reasons and CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonFinite { .. } => "non_finite",
            Error::SingularProjection { .. } => "singular_projection",
            Error::UnstableWidth { .. } => "unstable_width",
            Error::Diverged { .. } => "diverged",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::OrderOutOfRange { .. } => "order_out_of_range",
            Error::BoundUndefined(_) => "bound_undefined",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Attach an iteration index to a projection failure coming out of `linalg`.
    pub(crate) fn at_iteration(self, t: usize) -> Self {
        match self {
            Error::SingularProjection { columns, .. } => Error::SingularProjection {
                columns,
                iteration: Some(t),
            },
            other => other,
        }
    }
}
