use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown domain kind `{0}`")]
    UnknownDomain(String),

    #[error("disconnected or degenerate space: {0}")]
    Disconnected(String),

    #[error("vertex {0} is not reachable from vertex {1}")]
    Unreachable(usize, usize),

    #[error("vertex {vertex} lies on the singular set (dist = {dist})")]
    OnSingularSet { vertex: usize, dist: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("path is not a geodesic: length {length} exceeds distance {distance}")]
    NotGeodesic { length: f64, distance: f64 },

    #[error("ray too short: conformal length {length} < required {required}")]
    RayTooShort { length: f64, required: f64 },

    #[error("no real fixed-point exponents: discriminant {0} < 0")]
    ComplexExponents(f64),

    #[error("solution record is not a monomial: {0}")]
    NotMonomial(String),

    #[error("ellipticity violated at node {node}: {msg}")]
    Ellipticity { node: usize, msg: String },

    #[error("stencil failure at node {node}: {msg}")]
    Stencil { node: usize, msg: String },

    #[error("maximum principle precondition unmet: {0}")]
    MaximumPrinciple(String),

    #[error("singular or indefinite linear system: {0}")]
    SingularSystem(String),

    #[error("operator is not subcritical: {0}")]
    NotSubcritical(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("non-positive value where a positive one is required: {0}")]
    NonPositive(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
