use thiserror::Error;

/// Errors reported by the indexed hash set and the state stores built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("set scale {scale} outside supported range {min}..={max}")]
    InvalidScale { scale: u32, min: u32, max: u32 },

    #[error("could not allocate {bytes} bytes for a hash set")]
    Alloc { bytes: usize },

    #[error("hash set is full")]
    CapacityExhausted,

    #[error("index {0} is not occupied")]
    Unoccupied(u64),

    #[error("vector length {0} outside 1..=16777215")]
    LengthOutOfRange(usize),

    #[error("unknown state id (index {index}, length {length})")]
    UnknownId { index: u64, length: u32 },

    #[error("slice [{offset}, {offset}+{length}) outside state of length {state_len}")]
    OutOfBounds {
        offset: usize,
        length: usize,
        state_len: usize,
    },

    #[error("sparse delta entries must be sorted by offset and must not overlap")]
    UnsortedDeltas,

    #[error("delta entry at offset {0} carries no slots")]
    EmptyDelta(usize),

    #[error("embedded state id is malformed")]
    MalformedStateId,

    #[error("recursive operation needs a non-empty offset path")]
    EmptyPath,

    #[error("vector of length {len} does not fit the configured length {max}")]
    VectorTooLong { len: usize, max: usize },

    #[error("state pairs two slots into the reserved empty value")]
    ReservedValueCollision,
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;
