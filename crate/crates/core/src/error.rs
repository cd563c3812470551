use core::fmt;

/// Errors raised while validating parameters or evaluating metrics.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A parameter violates its documented range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Two consecutive waypoints coincide.
    DegenerateSegment { index: usize },
    /// A statistic was requested over an empty series.
    EmptySeries,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::DegenerateSegment { index } => {
                write!(f, "waypoints {index} and {} coincide", index + 1)
            }
            Error::EmptySeries => f.write_str("statistic of an empty error series"),
        }
    }
}

impl core::error::Error for Error {}
