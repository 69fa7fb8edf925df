use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group parameters m={m}, p={p}, n={n}: {reason}")]
    InvalidSpec {
        m: u32,
        p: u32,
        n: usize,
        reason: &'static str,
    },
    #[error("group order {order} exceeds the configured cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("unsupported group family G({m},{p},{n}) for this operation")]
    UnsupportedFamily { m: u32, p: u32, n: usize },
    #[error("unsupported irreducible representation {0}")]
    UnsupportedIrrep(String),
    #[error("unknown irreducible representation label {0:?}")]
    UnknownIrrep(String),
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("polynomial is not invariant under the group")]
    NotInvariant,
    #[error("no solution found: {0}")]
    NoSolution(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("point outside the open polydisc")]
    DomainViolation,
    #[error("degree {degree} exceeds the window cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("degree window too small: {0}")]
    WindowTooSmall(String),
    #[error("minimal vector of the isotype is not unique (dimension {dim} in degree {degree})")]
    NonUniqueMinimalVector { degree: usize, dim: usize },
    #[error("isotype is empty up to degree {0}")]
    EmptyIsotype(usize),
    #[error("operator is not normal (residual {0:e})")]
    NotNormal(f64),
    #[error("operators do not commute (residual {0:e})")]
    NotCommuting(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
