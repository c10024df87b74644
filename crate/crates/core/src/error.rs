use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("result unstable under margin doubling: {0}")]
    Unstable(String),
    #[error("region is not causally convex: {0}")]
    NotConvex(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not a fork: q.r1 != q.r2")]
    NotAFork,
    #[error("map is not well defined on the quotient; witness {0:?}")]
    IllDefined(Vec<String>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("region missing from universe: {0}")]
    MissingRegion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
