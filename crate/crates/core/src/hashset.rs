//! Fixed-capacity concurrent indexed hash set.
//!
//! Maps each distinct `(value, tag)` pair to a stable bucket index. Values are
//! full 64-bit words; occupancy lives in a separate per-bucket metadata word,
//! so no value is reserved as an empty marker.
//!
//! Metadata layout (32 bits):
//!
//! ```text
//!  31 30 | 29 ........ 24 | 23 ............ 0
//!  state |  fingerprint   |       tag
//! ```
//!
//! A bucket goes `EMPTY -> BUSY -> DONE` exactly once. The claiming thread
//! writes the value between the two transitions and publishes it with a
//! release store of `DONE`. Probing is linear over the whole table.

use std::alloc::{self, Layout};
use std::hint;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use crate::error::{Result, StoreError};

pub const MIN_SCALE: u32 = 4;
pub const MAX_SCALE: u32 = 40;

/// Largest tag a bucket can carry.
pub const MAX_TAG: u32 = (1 << 24) - 1;

/// Bytes per occupied entry: 8 for the value, 4 for the metadata word.
pub const ENTRY_BYTES: u64 = 12;

const STATE_SHIFT: u32 = 30;
const EMPTY: u32 = 0;
const BUSY: u32 = 1 << STATE_SHIFT;
const DONE: u32 = 2 << STATE_SHIFT;
const STATE_MASK: u32 = 3 << STATE_SHIFT;
const KEY_MASK: u32 = !STATE_MASK;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetConfig {
    pub scale: u32,
}

impl SetConfig {
    pub fn new(scale: u32) -> Self {
        SetConfig { scale }
    }

    pub fn capacity(&self) -> u64 {
        1 << self.scale
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SetStats {
    pub occupancy: u64,
    pub memory_bytes: u64,
}

pub struct IndexedHashSet {
    values: Box<[AtomicU64]>,
    meta: Box<[AtomicU32]>,
    mask: u64,
    occupancy: AtomicU64,
}

impl IndexedHashSet {
    pub fn new(cfg: SetConfig) -> Result<Self> {
        if !(MIN_SCALE..=MAX_SCALE).contains(&cfg.scale) {
            return Err(StoreError::InvalidScale {
                scale: cfg.scale,
                min: MIN_SCALE,
                max: MAX_SCALE,
            });
        }
        let capacity =
            usize::try_from(cfg.capacity()).map_err(|_| StoreError::Alloc { bytes: usize::MAX })?;
        Ok(IndexedHashSet {
            values: zeroed_atomics(capacity)?,
            meta: zeroed_atomics(capacity)?,
            mask: cfg.capacity() - 1,
            occupancy: AtomicU64::new(0),
        })
    }

    pub fn capacity(&self) -> u64 {
        self.mask + 1
    }

    /// Returns the index of `(value, tag)`, inserting it if absent. Across all
    /// threads exactly one caller per distinct pair sees `true`.
    pub fn insert_if_absent(&self, value: u64, tag: u32) -> Result<(u64, bool)> {
        debug_assert!(tag <= MAX_TAG);
        let hash = mix(value, tag);
        let key = ((hash >> 58) as u32) << 24 | (tag & MAX_TAG);
        let mut bucket = hash & self.mask;

        for _ in 0..=self.mask {
            let slot = &self.meta[bucket as usize];
            let mut meta = slot.load(Ordering::Acquire);
            if meta == EMPTY {
                match slot.compare_exchange(EMPTY, BUSY | key, Ordering::AcqRel, Ordering::Acquire)
                {
                    Ok(_) => {
                        self.values[bucket as usize].store(value, Ordering::Relaxed);
                        slot.store(DONE | key, Ordering::Release);
                        self.occupancy.fetch_add(1, Ordering::Relaxed);
                        return Ok((bucket, true));
                    }
                    Err(current) => meta = current,
                }
            }
            if meta & KEY_MASK == key {
                while meta & STATE_MASK == BUSY {
                    hint::spin_loop();
                    meta = slot.load(Ordering::Acquire);
                }
                if self.values[bucket as usize].load(Ordering::Relaxed) == value {
                    return Ok((bucket, false));
                }
            }
            bucket = (bucket + 1) & self.mask;
        }
        Err(StoreError::CapacityExhausted)
    }

    /// Reads back the pair stored at `index`.
    pub fn read(&self, index: u64) -> Result<(u64, u32)> {
        let meta = self
            .meta
            .get(usize::try_from(index).unwrap_or(usize::MAX))
            .ok_or(StoreError::Unoccupied(index))?
            .load(Ordering::Acquire);
        if meta & STATE_MASK != DONE {
            return Err(StoreError::Unoccupied(index));
        }
        let value = self.values[index as usize].load(Ordering::Relaxed);
        Ok((value, meta & MAX_TAG))
    }

    pub fn occupancy(&self) -> u64 {
        self.occupancy.load(Ordering::Relaxed)
    }

    pub fn stats(&self) -> SetStats {
        let occupancy = self.occupancy();
        SetStats {
            occupancy,
            memory_bytes: occupancy * ENTRY_BYTES,
        }
    }

    pub fn allocated_bytes(&self) -> u64 {
        self.capacity() * ENTRY_BYTES
    }
}

impl std::fmt::Debug for IndexedHashSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IndexedHashSet")
            .field("capacity", &self.capacity())
            .field("occupancy", &self.occupancy())
            .finish()
    }
}

/// Murmur3-style finalizer over the value with the tag folded in.
fn mix(value: u64, tag: u32) -> u64 {
    let mut h = value
        ^ (tag as u64)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .rotate_left(31);
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Types whose all-zero bit pattern is a valid value.
trait ZeroInit {}
impl ZeroInit for AtomicU64 {}
impl ZeroInit for AtomicU32 {}

/// Zeroed allocation so the OS can hand out pages lazily for large scales.
fn zeroed_atomics<T: ZeroInit>(len: usize) -> Result<Box<[T]>> {
    let layout = Layout::array::<T>(len).map_err(|_| StoreError::Alloc { bytes: usize::MAX })?;
    assert!(layout.size() > 0);
    // SAFETY: the layout is non-zero sized; zero bytes are a valid `T` per
    // `ZeroInit`; the box is freed with the same array layout.
    unsafe {
        let ptr = alloc::alloc_zeroed(layout) as *mut T;
        if ptr.is_null() {
            return Err(StoreError::Alloc {
                bytes: layout.size(),
            });
        }
        Ok(Box::from_raw(std::ptr::slice_from_raw_parts_mut(ptr, len)))
    }
}
