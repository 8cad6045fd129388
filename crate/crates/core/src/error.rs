use thiserror::Error;

use crate::seq::SpaceKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resolution level {level} exceeds the configured maximum {max}")]
    ResolutionOverflow { level: u32, max: u32 },

    #[error("space kind mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch { expected: SpaceKind, found: SpaceKind },

    #[error(
        "{blocks} coupled value blocks exceed the exact-enumeration cap of {cap}; \
         use pettis_norm_bounds instead"
    )]
    BlockCapExceeded { blocks: usize, cap: usize },

    #[error("subset enumeration over {atoms} atoms exceeds the cap of {cap}")]
    EnumerationOverflow { atoms: usize, cap: usize },

    #[error("sequence has no limit candidate f_0")]
    MissingLimit,

    #[error("sequence is empty")]
    EmptySequence,

    #[error("invalid dyadic set: {0}")]
    InvalidSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid step function: {0}")]
    InvalidFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
