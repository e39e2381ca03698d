use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no analyzable values")]
    NoAnalyzableValues,

    #[error("digit domain mismatch: observed {observed}, reference {reference}")]
    DomainMismatch { observed: String, reference: String },

    #[error("no observations (n = 0)")]
    EmptyData,

    #[error("cardinality requires an upper bound")]
    UnboundedRestriction,

    #[error("empty restriction: no admissible integer has a digit in the domain")]
    EmptyRestriction,

    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),

    #[error("unsupported joint order k = {0} (supported: 2..=6)")]
    UnsupportedJointOrder(u32),

    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("invalid prior probability {0}: must lie strictly between 0 and 1")]
    InvalidPrior(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsatisfiable mixture component {component}: no positive draw after {attempts} attempts")]
    Unsatisfiable { component: usize, attempts: usize },

    #[error("empty law list")]
    EmptyLawList,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
