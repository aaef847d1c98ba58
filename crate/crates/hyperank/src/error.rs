use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared across the toolkit.
///
/// [`Error::exit_code`] maps variants onto the CLI exit-code contract:
/// 1 for validation/configuration problems, 2 for infeasibility, 3 for I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document (JSON syntax, wrong shape). Carries the
    /// parser's line/column context.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed instance that violates model invariants.
    #[error("invalid instance:\n{0}")]
    Validation(ValidationReport),

    /// Bad configuration: unresolved attribute, malformed metric set,
    /// invalid generator spec, unusable arguments.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside a matching function's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// No feasible assignment exists for the request.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Instance on which the requested quantity is undefined
    /// (e.g. an optimal cost of zero makes the cost ratio meaningless).
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    /// Operation invoked outside its stated preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    /// A cycle was found where a DAG was required. Lists one cycle.
    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::Config(_)
            | Error::Domain(_)
            | Error::Degenerate(_)
            | Error::Usage(_)
            | Error::Cycle(_) => 1,
            Error::Infeasible(_) => 2,
            Error::Io(_) => 3,
        }
    }
}
