use thiserror::Error;

/// Errors raised by the physical-layer stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhyError {
    #[error("{what}: expected {expected} elements, got {actual}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{what}: length {actual} is not a multiple of {multiple}")]
    Padding {
        what: &'static str,
        multiple: usize,
        actual: usize,
    },

    #[error("scrambler seed must be a nonzero 15-bit value, got {0:#06x}")]
    InvalidSeed(u16),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PhyError>;

pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(PhyError::SizeMismatch {
            what,
            expected,
            actual,
        })
    }
}
