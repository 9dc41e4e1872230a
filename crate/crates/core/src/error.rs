use thiserror::Error;

use crate::lattice::Vertex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("uniform draw {0} outside [0, 1)")]
    Domain(f64),
    #[error("vertex {vertex} outside box of side {side}")]
    OutOfBox { vertex: Vertex, side: u32 },
    #[error("{p} is not below {q} coordinatewise")]
    Ordering { p: Vertex, q: Vertex },
    #[error("displacement {0} exceeds the brute-force limit of 8 per axis")]
    TooLarge(u32),
    #[error("index {index} outside curve range [{lo}, {hi}]")]
    IndexRange { index: i64, lo: i64, hi: i64 },
    #[error("point ({x}, {t}) maps outside the box")]
    RescaledOutOfBox { x: f64, t: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("malformed dump: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
