use thiserror::Error;

/// Failures raised by the library. The command-line tool maps them onto
/// exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input: dimension mismatch, duplicate
    /// points, a non-unit sample where a unit vector is required.
    #[error("input error: {0}")]
    Input(String),
    /// A geometric object could not be built (unbounded gauge, degenerate
    /// polygon, a boundary segment spanning two quadrants).
    #[error("geometry error: {0}")]
    Geometry(String),
    /// A certificate could not be assembled because one of its hypotheses
    /// does not hold on the given data.
    #[error("certificate error: {0}")]
    Certificate(String),
    /// A check that a proven bound guarantees has failed. Either the input
    /// violates a precondition that slipped through, or there is a bug.
    #[error("falsification alarm: {0}")]
    Falsification(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn certificate(msg: impl Into<String>) -> Self {
        Error::Certificate(msg.into())
    }

    pub(crate) fn falsification(msg: impl Into<String>) -> Self {
        Error::Falsification(msg.into())
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Falsification(_) => 2,
            _ => 1,
        }
    }
}
