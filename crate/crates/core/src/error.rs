use thiserror::Error;

/// Errors raised by the evaluation engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composition parts must be at least 1")]
    ZeroPart,
    #[error("composition must be non-empty")]
    EmptyComposition,
    #[error("deformation level must be at least 1, got {0}")]
    InvalidLevel(u32),
    #[error("point {0} lies outside (0, 1]")]
    OutOfUnitInterval(String),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("truncation order {order} too small for level {n} (need at least {min})")]
    OrderTooSmall { order: usize, n: u32, min: usize },
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
    #[error("target {0} outside the attainable range")]
    TargetOutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_level(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidLevel(n))
    } else {
        Ok(())
    }
}
