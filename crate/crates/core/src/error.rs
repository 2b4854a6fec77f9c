use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An element, coset or tuple does not belong to the model it is used with.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid space configuration: {0}")]
    InvalidSpace(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("the projection of c(B) onto B is the whole coset B")]
    InfiniteProjection,
    #[error("element is not a member of the coset")]
    NotInCoset,
    #[error("the two cosets must be distinct")]
    IdenticalCosets,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("chains of degree 0 have no boundary")]
    DegreeZero,
    #[error("kernel defined on factor {factor} evaluated on a tuple outside that factor")]
    DomainViolation { factor: usize },
    #[error("coefficient kind mismatch")]
    KindMismatch,
    #[error("unsupported factor: {0}")]
    UnsupportedFactor(String),
    #[error("parameter too small, retry with at least {minimal}")]
    RetryLarger { minimal: u64 },
    #[error("recovery failed: {0}")]
    Recovery(String),
}
