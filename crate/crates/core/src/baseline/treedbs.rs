//! Fixed-length compression tree in the array layout used by the TreeDBS
//! implementation, plus a router that combines it with the hash map store.
//!
//! For a configured length `L` the tree is an array of `2L` cells: cells
//! `L..2L` hold the (zero-padded) slots and node `i` for `i` in `1..L` pairs
//! cells `2i` and `2i+1`. Pairs are therefore formed from the end of the
//! vector. Node 1 is the top node.
//!
//! The original reserves the all-ones word as its empty-bucket marker; this
//! store reproduces that limitation by refusing any node equal to it.

use crate::error::{Result, StoreError};
use crate::hashset::{IndexedHashSet, SetConfig};
use crate::state::{
    check_length, overlay, overlay_sparse, InsertResult, Slot, SparseDeltaList, StateId,
};
use crate::storage::{StateStore, StoreStats};

use super::cchm::CchmStore;

const RESERVED: u64 = u64::MAX;

pub struct FixedTreeStore {
    length: usize,
    root_set: IndexedHashSet,
    data_set: IndexedHashSet,
}

impl FixedTreeStore {
    /// `length` must be at least 2; the data scale is capped at 32 bits.
    pub fn new(length: usize, root_scale: u32, data_scale: u32) -> Result<Self> {
        if length < 2 {
            return Err(StoreError::LengthOutOfRange(length));
        }
        check_length(length)?;
        if data_scale > crate::dtree::MAX_DATA_SCALE {
            return Err(StoreError::InvalidScale {
                scale: data_scale,
                min: crate::hashset::MIN_SCALE,
                max: crate::dtree::MAX_DATA_SCALE,
            });
        }
        Ok(FixedTreeStore {
            length,
            root_set: IndexedHashSet::new(SetConfig::new(root_scale))?,
            data_set: IndexedHashSet::new(SetConfig::new(data_scale))?,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    fn top(&self, id: StateId, root: bool) -> Result<u64> {
        let found = if root {
            self.root_set
                .read(id.index())
                .ok()
                .filter(|&(_, tag)| tag as usize == id.len())
        } else {
            self.data_set.read(id.index()).ok()
        };
        match found {
            Some((value, _)) if (1..=self.length).contains(&id.len()) => Ok(value),
            _ => Err(StoreError::UnknownId {
                index: id.index(),
                length: id.len() as u32,
            }),
        }
    }

    fn expand(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        let n = self.length;
        let mut cells = vec![0u32; 2 * n];
        let mut nodes = vec![0u64; n];
        nodes[1] = self.top(id, root)?;
        for i in 1..n {
            let (left, right) = (nodes[i] as u32, (nodes[i] >> 32) as u32);
            for (pos, half) in [(2 * i, left), (2 * i + 1, right)] {
                if pos < n {
                    nodes[pos] = self.data_set.read(half as u64)?.0;
                } else {
                    cells[pos] = half;
                }
            }
        }
        cells.drain(..n);
        cells.truncate(id.len());
        Ok(cells)
    }
}

impl StateStore for FixedTreeStore {
    fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult> {
        check_length(v.len())?;
        let n = self.length;
        if v.len() > n {
            return Err(StoreError::VectorTooLong {
                len: v.len(),
                max: n,
            });
        }
        let mut cells = vec![0u32; 2 * n];
        cells[n..n + v.len()].copy_from_slice(v);
        let mut top = 0;
        for i in (1..n).rev() {
            let node = cells[2 * i] as u64 | (cells[2 * i + 1] as u64) << 32;
            if node == RESERVED {
                return Err(StoreError::ReservedValueCollision);
            }
            if i == 1 {
                top = node;
            } else {
                cells[i] = self.data_set.insert_if_absent(node, 0)?.0 as u32;
            }
        }
        let (index, is_new) = if root {
            self.root_set.insert_if_absent(top, v.len() as u32)?
        } else {
            self.data_set.insert_if_absent(top, 0)?
        };
        Ok(InsertResult {
            id: StateId::new(index, v.len()),
            is_new,
        })
    }

    fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        self.expand(id, root)
    }

    fn get_partial(
        &self,
        id: StateId,
        offset: usize,
        length: usize,
        root: bool,
    ) -> Result<Vec<Slot>> {
        slice_of(self.expand(id, root)?, offset, length)
    }

    fn delta(&self, id: StateId, offset: usize, d: &[Slot], root: bool) -> Result<InsertResult> {
        if d.is_empty() {
            return Err(StoreError::EmptyDelta(offset));
        }
        self.insert(&overlay(&self.expand(id, root)?, offset, d), root)
    }

    fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult> {
        self.insert(&overlay_sparse(&self.expand(id, root)?, deltas), root)
    }

    /// Same footprint as the compression tree: 12 bytes per occupied entry.
    fn stats(&self) -> StoreStats {
        let root = self.root_set.stats();
        let data = self.data_set.stats();
        StoreStats {
            root_occupancy: root.occupancy,
            data_occupancy: data.occupancy,
            node_count: root.occupancy + data.occupancy,
            memory_bytes: root.memory_bytes + data.memory_bytes,
            allocated_bytes: self.root_set.allocated_bytes() + self.data_set.allocated_bytes(),
        }
    }
}

fn slice_of(v: Vec<Slot>, offset: usize, length: usize) -> Result<Vec<Slot>> {
    if length == 0 || offset + length > v.len() {
        return Err(StoreError::OutOfBounds {
            offset,
            length,
            state_len: v.len(),
        });
    }
    Ok(v[offset..offset + length].to_vec())
}

/// Routes vectors of exactly the configured length to a [`FixedTreeStore`]
/// and everything else to a [`CchmStore`]. The id length tells which store
/// an id belongs to.
pub struct TreeDbsHybrid {
    tree: FixedTreeStore,
    other: CchmStore,
}

impl TreeDbsHybrid {
    pub fn new(length: usize, root_scale: u32, data_scale: u32, sub_scale: u32) -> Result<Self> {
        if !(crate::hashset::MIN_SCALE..=crate::hashset::MAX_SCALE).contains(&sub_scale) {
            return Err(StoreError::InvalidScale {
                scale: sub_scale,
                min: crate::hashset::MIN_SCALE,
                max: crate::hashset::MAX_SCALE,
            });
        }
        Ok(TreeDbsHybrid {
            tree: FixedTreeStore::new(length, root_scale, data_scale)?,
            other: CchmStore::with_capacity(1 << sub_scale),
        })
    }

    fn route(&self, len: usize) -> &dyn StateStore {
        if len == self.tree.length() {
            &self.tree
        } else {
            &self.other
        }
    }
}

impl StateStore for TreeDbsHybrid {
    fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult> {
        self.route(v.len()).insert(v, root)
    }

    fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        self.route(id.len()).get(id, root)
    }

    fn get_partial(
        &self,
        id: StateId,
        offset: usize,
        length: usize,
        root: bool,
    ) -> Result<Vec<Slot>> {
        self.route(id.len()).get_partial(id, offset, length, root)
    }

    fn delta(&self, id: StateId, offset: usize, d: &[Slot], root: bool) -> Result<InsertResult> {
        if d.is_empty() {
            return Err(StoreError::EmptyDelta(offset));
        }
        check_length(offset + d.len())?;
        let base = self.get(id, root)?;
        self.insert(&overlay(&base, offset, d), root)
    }

    fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult> {
        let base = self.get(id, root)?;
        self.insert(&overlay_sparse(&base, deltas), root)
    }

    fn stats(&self) -> StoreStats {
        self.tree.stats().combine(self.other.stats())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(len: usize) -> FixedTreeStore {
        FixedTreeStore::new(len, 10, 12).unwrap()
    }

    #[test]
    fn pads_but_returns_true_length() {
        let s = store(8);
        let r = s.insert(&[1, 2, 3, 4, 5, 6], true).unwrap();
        assert_eq!(r.id.len(), 6);
        assert_eq!(s.get(r.id, true).unwrap(), [1, 2, 3, 4, 5, 6]);
        // a padded vector of length 8 has 7 nodes
        assert_eq!(s.stats().node_count, 7);
    }

    #[test]
    fn padding_region_does_not_merge_states() {
        let s = store(4);
        let short = s.insert(&[1, 2], true).unwrap();
        let padded = s.insert(&[1, 2, 0], true).unwrap();
        assert!(short.is_new && padded.is_new);
        assert_ne!(short.id, padded.id);
        assert_eq!(s.get(padded.id, true).unwrap(), [1, 2, 0]);
    }

    #[test]
    fn rejects_long_vectors_and_reserved_pairs() {
        let s = store(4);
        assert_eq!(
            s.insert(&[1, 2, 3, 4, 5], true),
            Err(StoreError::VectorTooLong { len: 5, max: 4 })
        );
        assert_eq!(
            s.insert(&[1, 2, u32::MAX, u32::MAX], true),
            Err(StoreError::ReservedValueCollision)
        );
        // an all-ones pair that the layout never pairs is fine
        let r = s.insert(&[1, u32::MAX, u32::MAX, 4], true).unwrap();
        assert_eq!(s.get(r.id, true).unwrap(), [1, u32::MAX, u32::MAX, 4]);
    }

    #[test]
    fn odd_length_layout_pairs_from_the_end() {
        let s = store(5);
        let id = s.insert(&[1, 2, 3, 4, 5], true).unwrap().id;
        assert_eq!(s.get(id, true).unwrap(), [1, 2, 3, 4, 5]);
        assert_eq!(s.get_partial(id, 3, 2, true).unwrap(), [4, 5]);
        assert_eq!(s.stats().node_count, 4);
    }

    #[test]
    fn delta_via_reconstruction() {
        let s = store(10);
        let id = s.insert(&[1, 2, 3, 4, 5, 6], true).unwrap().id;
        let r = s.delta(id, 8, &[7, 8], true).unwrap();
        assert_eq!(s.get(r.id, true).unwrap(), [1, 2, 3, 4, 5, 6, 0, 0, 7, 8]);
        assert!(matches!(
            s.delta(id, 9, &[7, 8], true),
            Err(StoreError::VectorTooLong { .. })
        ));
    }

    #[test]
    fn hybrid_routes_by_length() {
        let h = TreeDbsHybrid::new(4, 10, 10, 10).unwrap();
        let four = h.insert(&[1, 2, 3, 4], true).unwrap();
        let six = h.insert(&[1, 2, 3, 4, 5, 6], true).unwrap();
        assert_eq!(h.get(four.id, true).unwrap(), [1, 2, 3, 4]);
        assert_eq!(h.get(six.id, true).unwrap(), [1, 2, 3, 4, 5, 6]);
        let shrunk_route = h.delta(six.id, 0, &[9], true).unwrap();
        assert_eq!(h.get(shrunk_route.id, true).unwrap(), [9, 2, 3, 4, 5, 6]);
        let s = h.stats();
        assert_eq!(s.root_occupancy, 3);
        // long vectors may contain the reserved pair since they bypass the tree
        assert!(h.insert(&[u32::MAX; 6], true).is_ok());
    }
}
