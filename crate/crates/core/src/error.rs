use thiserror::Error;

/// Errors raised by the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside the range where the operation is defined.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A matrix did not have the dimension the operation requires.
    #[error("expected a {expected}x{expected} matrix, got {actual}x{actual}")]
    Shape { expected: usize, actual: usize },

    /// A count argument was invalid (for example zero trials).
    #[error("{name} must be at least {min}, got {value}")]
    Count {
        name: &'static str,
        value: u64,
        min: u64,
    },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, range })
    }
}
