//! Uncompressed concurrent hash map store.
//!
//! Every distinct vector is kept whole. The map is lock-striped: a vector
//! hashes to one of `SHARDS` shards, each a mutex-guarded map plus the list
//! of vectors in insertion order. Ids encode `(local index, shard)`.

use std::collections::hash_map::{DefaultHasher, Entry};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Result, StoreError};
use crate::state::{
    check_length, overlay, overlay_sparse, InsertResult, Slot, SparseDeltaList, StateId, INDEX_BITS,
};
use crate::storage::{StateStore, StoreStats};

const SHARD_BITS: u32 = 6;
const SHARDS: usize = 1 << SHARD_BITS;

/// Per-entry bookkeeping on top of the slots: the id word and a chain link.
pub const ENTRY_OVERHEAD_BYTES: u64 = 16;

#[derive(Default)]
struct Shard {
    index: HashMap<Arc<[Slot]>, u64>,
    vectors: Vec<Arc<[Slot]>>,
}

struct Table {
    shards: Box<[Mutex<Shard>]>,
    entries: AtomicU64,
    slots: AtomicU64,
}

impl Table {
    fn new() -> Self {
        Table {
            shards: (0..SHARDS).map(|_| Mutex::default()).collect(),
            entries: AtomicU64::new(0),
            slots: AtomicU64::new(0),
        }
    }
}

pub struct CchmStore {
    roots: Table,
    data: Table,
    capacity: u64,
    used: AtomicU64,
}

impl CchmStore {
    /// Store without an entry limit beyond the 40-bit id space.
    pub fn new() -> Self {
        Self::with_capacity(1 << INDEX_BITS)
    }

    /// Store holding at most `capacity` vectors over both namespaces.
    pub fn with_capacity(capacity: u64) -> Self {
        CchmStore {
            roots: Table::new(),
            data: Table::new(),
            capacity,
            used: AtomicU64::new(0),
        }
    }

    fn table(&self, root: bool) -> &Table {
        if root {
            &self.roots
        } else {
            &self.data
        }
    }

    fn lookup(&self, id: StateId, root: bool) -> Result<Arc<[Slot]>> {
        let shard = (id.index() as usize) & (SHARDS - 1);
        let local = (id.index() >> SHARD_BITS) as usize;
        let guard = self.table(root).shards[shard].lock().unwrap();
        match guard.vectors.get(local) {
            Some(v) if v.len() == id.len() => Ok(v.clone()),
            _ => Err(StoreError::UnknownId {
                index: id.index(),
                length: id.len() as u32,
            }),
        }
    }
}

impl Default for CchmStore {
    fn default() -> Self {
        Self::new()
    }
}

impl StateStore for CchmStore {
    fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult> {
        check_length(v.len())?;
        let mut hasher = DefaultHasher::new();
        v.hash(&mut hasher);
        let shard = (hasher.finish() as usize) & (SHARDS - 1);
        let table = self.table(root);
        let mut guard = table.shards[shard].lock().unwrap();
        let next_local = guard.vectors.len() as u64;
        let key: Arc<[Slot]> = Arc::from(v);
        let (local, is_new) = match guard.index.entry(key.clone()) {
            Entry::Occupied(e) => (*e.get(), false),
            Entry::Vacant(e) => {
                if self.used.fetch_add(1, Ordering::Relaxed) >= self.capacity {
                    self.used.fetch_sub(1, Ordering::Relaxed);
                    return Err(StoreError::CapacityExhausted);
                }
                e.insert(next_local);
                (next_local, true)
            }
        };
        if is_new {
            guard.vectors.push(key);
            table.entries.fetch_add(1, Ordering::Relaxed);
            table.slots.fetch_add(v.len() as u64, Ordering::Relaxed);
        }
        Ok(InsertResult {
            id: StateId::new(local << SHARD_BITS | shard as u64, v.len()),
            is_new,
        })
    }

    fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        Ok(self.lookup(id, root)?.to_vec())
    }

    fn get_partial(
        &self,
        id: StateId,
        offset: usize,
        length: usize,
        root: bool,
    ) -> Result<Vec<Slot>> {
        if length == 0 || offset + length > id.len() {
            return Err(StoreError::OutOfBounds {
                offset,
                length,
                state_len: id.len(),
            });
        }
        Ok(self.lookup(id, root)?[offset..offset + length].to_vec())
    }

    fn delta(&self, id: StateId, offset: usize, d: &[Slot], root: bool) -> Result<InsertResult> {
        if d.is_empty() {
            return Err(StoreError::EmptyDelta(offset));
        }
        check_length(offset + d.len())?;
        let base = self.lookup(id, root)?;
        self.insert(&overlay(&base, offset, d), root)
    }

    fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult> {
        let base = self.lookup(id, root)?;
        self.insert(&overlay_sparse(&base, deltas), root)
    }

    /// Each entry costs its slots plus [`ENTRY_OVERHEAD_BYTES`].
    fn stats(&self) -> StoreStats {
        let roots = self.roots.entries.load(Ordering::Relaxed);
        let data = self.data.entries.load(Ordering::Relaxed);
        let slots =
            self.roots.slots.load(Ordering::Relaxed) + self.data.slots.load(Ordering::Relaxed);
        let memory = slots * 4 + (roots + data) * ENTRY_OVERHEAD_BYTES;
        StoreStats {
            root_occupancy: roots,
            data_occupancy: data,
            node_count: roots + data,
            memory_bytes: memory,
            allocated_bytes: memory,
        }
    }
}
