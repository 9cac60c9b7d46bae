use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates its constraint.
    #[error("invalid parameter `{name}`: {constraint}")]
    Parameter {
        name: &'static str,
        constraint: String,
    },

    /// A formula was evaluated outside the region where it is defined.
    #[error("outside formula domain: {0}")]
    Domain(String),

    #[error("event limit of {limit} exceeded while generating a period")]
    EventLimit { limit: u64 },

    #[error("timeline contains no deliveries; age is undefined")]
    EmptyTrajectory,

    #[error("timeline contains no deliveries; nothing to estimate from")]
    EmptyEstimate,

    #[error("measurement span has zero length")]
    ZeroSpan,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, constraint: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            constraint: constraint.into(),
        }
    }
}
