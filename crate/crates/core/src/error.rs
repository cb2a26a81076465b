use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of a mathematical function.
    #[error("domain error in {function}: {reason}")]
    Domain {
        function: &'static str,
        reason: String,
    },

    /// A parameter violates the invariants of its type.
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    /// `sigma * sqrt(t)` is zero, so d+ and d- are undefined.
    #[error("degenerate volatility: sigma * sqrt(t) = 0")]
    DegenerateVolatility,

    /// Adaptive quadrature ran out of subdivisions.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (best estimate {estimate}, error estimate {error})"
    )]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error(
        "risk-neutral step probability {probability} is outside (0, 1) with {steps} steps; \
         use a larger number of steps"
    )]
    TreeParameterization { probability: f64, steps: usize },

    #[error("insufficient data: {got} samples, at least {need} required")]
    InsufficientData { got: usize, need: usize },
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            function,
            reason: reason.into(),
        }
    }
}
