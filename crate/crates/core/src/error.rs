use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by every conelab operation.
///
/// Validation failures (bad parameters, malformed input, inadmissible
/// geometry) are kept apart from numerical failures so the command-line
/// driver can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("inadmissible cross-section: {0}")]
    Inadmissible(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid field `{field}`: {message}{}", location(*.line, *.column))]
    Parse {
        field: String,
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },

    #[error("invalid configuration key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("quadrature diverged for {field} with p = {p}: {detail}")]
    Divergent {
        field: &'static str,
        p: f64,
        detail: String,
    },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e} ({field})")]
    Quadrature {
        field: &'static str,
        estimate: f64,
        tolerance: f64,
    },
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        (Some(l), None) => format!(" (line {l})"),
        _ => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the caller's input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Solver(_) | Error::Divergent { .. } | Error::Quadrature { .. }
        )
    }
}
