use std::fmt;

use thiserror::Error;

use crate::ratmod::Rational;

/// Which side of a gap has no bounding element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A resource guard refused the request (enumeration size, memory, integer range).
    #[error("refused: {0}")]
    Guard(String),

    #[error("gap around {center} is unbounded on the {side} side at N = {n_max}")]
    UnboundedGap {
        center: Rational,
        side: Side,
        n_max: u64,
    },

    /// The ray family passes through lattice points at every rational of the screen.
    #[error("singular intercept: {} rational shadow points instead of gaps", rational_shadows.len())]
    SingularIntercept { rational_shadows: Vec<Rational> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
