use thiserror::Error;

/// Errors raised by the estimators, samplers and closed-form constants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative routine did not converge.
    #[error("numerical failure in {routine}: {detail}")]
    Numerical { routine: &'static str, detail: String },

    /// Two algebraically equal expressions disagreed beyond tolerance.
    #[error("internal consistency check `{what}` failed: {left} vs {right}")]
    Consistency { what: &'static str, left: f64, right: f64 },

    /// The requested vertex count is too small for the quantity to exist.
    #[error("degenerate vertex count N={n_vertices}: {detail}")]
    DegenerateN { n_vertices: usize, detail: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            routine,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
