//! Slots, state handles and delta descriptions shared by every store.

use std::fmt;

use crate::error::{Result, StoreError};

/// One 32-bit unit of a state vector.
pub type Slot = u32;

/// Longest vector a [`StateId`] can describe.
pub const MAX_LENGTH: usize = (1 << 24) - 1;

/// Number of index bits in a [`StateId`].
pub const INDEX_BITS: u32 = 40;

const LENGTH_BITS: u32 = 24;
const LENGTH_MASK: u64 = (1 << LENGTH_BITS) - 1;

/// Handle to a stored state: a 40-bit set index in the upper bits and the
/// 24-bit vector length in the lower bits of one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u64);

#[allow(clippy::len_without_is_empty)]
impl StateId {
    pub fn new(index: u64, length: usize) -> Self {
        debug_assert!(index < 1 << INDEX_BITS, "index {index} exceeds 40 bits");
        debug_assert!((1..=MAX_LENGTH).contains(&length));
        StateId((index << LENGTH_BITS) | length as u64)
    }

    pub fn from_raw(raw: u64) -> Self {
        StateId(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn index(self) -> u64 {
        self.0 >> LENGTH_BITS
    }

    pub fn len(self) -> usize {
        (self.0 & LENGTH_MASK) as usize
    }

    /// The two slots an embedded id occupies: low word first.
    pub fn to_slots(self) -> [Slot; 2] {
        [self.0 as u32, (self.0 >> 32) as u32]
    }

    /// Decodes an id embedded in a state vector. A zero length is rejected.
    pub fn from_slots(slots: &[Slot]) -> Result<Self> {
        match slots {
            [lo, hi] => {
                let id = StateId(*lo as u64 | (*hi as u64) << 32);
                if id.len() == 0 {
                    Err(StoreError::MalformedStateId)
                } else {
                    Ok(id)
                }
            }
            _ => Err(StoreError::MalformedStateId),
        }
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateId({}:{})", self.index(), self.len())
    }
}

/// Outcome of an insert-like operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertResult {
    pub id: StateId,
    pub is_new: bool,
}

pub(crate) fn check_length(len: usize) -> Result<()> {
    if (1..=MAX_LENGTH).contains(&len) {
        Ok(())
    } else {
        Err(StoreError::LengthOutOfRange(len))
    }
}

/// A run of slots to write at `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEntry {
    pub offset: usize,
    pub data: Vec<Slot>,
}

impl DeltaEntry {
    pub fn new(offset: usize, data: impl Into<Vec<Slot>>) -> Self {
        DeltaEntry {
            offset,
            data: data.into(),
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.data.len()
    }
}

/// Non-overlapping delta entries sorted by ascending offset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseDeltaList {
    entries: Vec<DeltaEntry>,
}

impl SparseDeltaList {
    pub fn new(entries: Vec<DeltaEntry>) -> Result<Self> {
        for e in &entries {
            if e.data.is_empty() {
                return Err(StoreError::EmptyDelta(e.offset));
            }
        }
        if entries.windows(2).any(|w| w[0].end() > w[1].offset) {
            return Err(StoreError::UnsortedDeltas);
        }
        if let Some(last) = entries.last() {
            check_length(last.end())?;
        }
        Ok(SparseDeltaList { entries })
    }

    pub fn single(offset: usize, data: impl Into<Vec<Slot>>) -> Result<Self> {
        Self::new(vec![DeltaEntry::new(offset, data)])
    }

    pub fn entries(&self) -> &[DeltaEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the last written slot, or 0 for an empty list.
    pub fn end(&self) -> usize {
        self.entries.last().map_or(0, DeltaEntry::end)
    }

    pub(crate) fn patches(&self) -> Vec<Patch<'_>> {
        self.entries
            .iter()
            .map(|e| Patch {
                offset: e.offset,
                data: &e.data,
            })
            .collect()
    }
}

/// Borrowed form of a delta entry used by the tree traversals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Patch<'a> {
    pub offset: usize,
    pub data: &'a [Slot],
}

impl Patch<'_> {
    pub fn end(&self) -> usize {
        self.offset + self.data.len()
    }
}

/// Writes `data` at `offset` into `base`, zero-filling any gap past its end.
pub fn overlay(base: &[Slot], offset: usize, data: &[Slot]) -> Vec<Slot> {
    let mut out = base.to_vec();
    apply_patch(&mut out, offset, data);
    out
}

/// Applies every entry of `deltas` to a copy of `base`.
pub fn overlay_sparse(base: &[Slot], deltas: &SparseDeltaList) -> Vec<Slot> {
    let mut out = base.to_vec();
    for e in deltas.entries() {
        apply_patch(&mut out, e.offset, &e.data);
    }
    out
}

fn apply_patch(out: &mut Vec<Slot>, offset: usize, data: &[Slot]) {
    let end = offset + data.len();
    if out.len() < end {
        out.resize(end, 0);
    }
    out[offset..end].copy_from_slice(data);
}
