use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Dimension mismatch, bad subsystem index and similar shape errors.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scalar function is undefined on part of an operator's spectrum.
    #[error("spectral domain error: {0}")]
    SpectralDomain(String),
    /// A validated object (Hermitian, density, CPTP, ...) failed its invariant.
    #[error("invalid {kind}: {detail}")]
    Invalid { kind: &'static str, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    /// The dense-storage budget would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
