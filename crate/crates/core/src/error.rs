use thiserror::Error;

/// Errors raised by the special-function kernel, the channel models and the
/// performance evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("overflow in {func} at {detail}")]
    Overflow { func: &'static str, detail: String },

    #[error("{func} did not converge: {detail}")]
    NonConvergence { func: &'static str, detail: String },

    #[error("pole collision in Meijer G parameters: a[{upper}] - b[{lower}] = {gap}")]
    PoleCollision {
        upper: usize,
        lower: usize,
        gap: f64,
    },

    #[error("no straight Mellin-Barnes contour separates the poles: {0}")]
    Contour(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_conv(func: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Overflow { .. } | Error::Contour(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
