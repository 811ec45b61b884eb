use thiserror::Error;

/// Errors reported by the calibration library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{param}: {message}")]
    Domain { param: &'static str, message: String },

    /// The requested privacy budget cannot be met by the family at any finite scale.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A bracketing or bisection search exhausted its iteration budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(param: &'static str, message: impl Into<String>) -> Self {
        Error::Domain { param, message: message.into() }
    }
}
