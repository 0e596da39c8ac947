use alloc::string::String;
use core::fmt;

/// Errors shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside its mathematical domain.
    Domain(String),
    /// Two step objects were combined at different grid resolutions.
    ResolutionMismatch { left: usize, right: usize },
    /// An operation requiring an exact sub-grid got a non-divisor resolution.
    DivisibilityRequired { resolution: usize, target: usize },
    /// An exhaustive routine was asked to exceed its enumeration budget.
    Budget {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::ResolutionMismatch { left, right } => {
                write!(f, "resolution mismatch: {left} vs {right} (refine first)")
            }
            Error::DivisibilityRequired { resolution, target } => write!(
                f,
                "target resolution {target} does not divide {resolution}"
            ),
            Error::Budget {
                what,
                limit,
                requested,
            } => write!(
                f,
                "{what}: requested size {requested} exceeds enumeration budget {limit}; \
                 use the heuristic variant"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
