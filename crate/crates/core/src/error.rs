use std::io;

use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum LshError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("no (r, b) within r <= {r_max}, b <= {b_max} meets the sensitivity targets")]
    Infeasible { r_max: u32, b_max: u32 },

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LshError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LshError::Domain(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        LshError::Format {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(LshError::Dimension { expected, found })
        }
    }
}

pub type Result<T, E = LshError> = std::result::Result<T, E>;
