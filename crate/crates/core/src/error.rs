use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("{what} of size {size} exceeds the configured limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("function or set is not supported on the given Bohr set (index {0})")]
    SupportViolation(usize),
    #[error("empty set where a nonempty one is required")]
    EmptySet,
    #[error("dual frequency carries {have} tail coefficients, {need} required")]
    PrecisionTooLow { have: usize, need: usize },
    #[error("cannot dilate by the zero polynomial")]
    ZeroDilate,
    #[error("Bohr set is not contained in G_{bound}")]
    DomainViolation { bound: usize },
    #[error("the zero function has no spectrum")]
    ZeroFunction,
    #[error("dissociated set of size {0} is too large for exhaustive span verification")]
    SpanCheckOverflow(usize),
    #[error("a set of density zero was supplied")]
    DegenerateDensity,
    #[error("ambient degree {n} must exceed s*l = {sl}")]
    ScaleTooSmall { n: usize, sl: usize },
    #[error("coefficients do not sum to zero")]
    NotTranslationInvariant,
    #[error("ambient group G_{{N+l}} of size {0} exceeds the solver limit")]
    AmbientOverflow(u128),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no regular width found down to grid step {0}")]
    NotFoundAtResolution(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("record store: {0}")]
    Store(String),
}

pub type Result<T> = std::result::Result<T, Error>;
