use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error(
        "quadrature did not reach tolerance in {context}: estimate {estimate:e}, error bound {error_bound:e}"
    )]
    Quadrature {
        context: String,
        estimate: f64,
        error_bound: f64,
    },

    #[error("inverse Laplace transform did not converge at x = {x:e} (tail estimate {tail:e})")]
    InverseLaplace { x: f64, tail: f64 },

    #[error("derivative order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("negative signal-power variance {variance:e} at l0 = {l0}, d0 = {d0}")]
    NegativeVariance { l0: f64, d0: f64, variance: f64 },

    #[error("non-outage probability {value} outside [0, 1] beyond tolerance at l0 = {l0}, d0 = {d0}, k = {k}")]
    ProbabilityOutOfBand { value: f64, l0: f64, d0: f64, k: u32 },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// Prefixes the context of a quadrature failure, so nested integrals can
    /// report which sub-integral failed.
    pub fn in_context(self, outer: &str) -> Self {
        match self {
            Error::Quadrature {
                context,
                estimate,
                error_bound,
            } => Error::Quadrature {
                context: format!("{outer} / {context}"),
                estimate,
                error_bound,
            },
            other => other,
        }
    }
}
