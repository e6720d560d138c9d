//! Compression tree over two indexed hash sets, shaped as a chain of perfectly
//! balanced binary trees.
//!
//! A node stands for a segment of a vector. For a segment of length `n >= 2`
//! the left child covers the first `lpst(n)` slots and the right child the
//! rest, so every left subtree is perfectly balanced and appending to a
//! vector leaves its existing left subtrees untouched.
//!
//! A node is one 64-bit word made of two 32-bit halves (left in the low
//! half). A half is the slot itself when its segment has length 1, otherwise
//! the data-set index of the child node. The top node of a root state lives
//! in the root set tagged with the vector length; every other node lives in
//! the data set with tag 0.
//!
//! ```text
//!   abcdefghijk (11)   ->   [8: abcdefgh] [3: ijk]
//!                                           [2: ij] [1: k]
//! ```

use crate::error::{Result, StoreError};
use crate::hashset::{IndexedHashSet, SetConfig, MAX_SCALE, MIN_SCALE};
use crate::state::{check_length, InsertResult, Patch, Slot, SparseDeltaList, StateId};
use crate::storage::{StateStore, StoreStats};

/// Data-set indices are paired into one word, so they must fit 32 bits.
pub const MAX_DATA_SCALE: u32 = 32;

/// Largest power of two strictly smaller than `x` (`x >= 2`).
pub fn lpst(x: usize) -> usize {
    debug_assert!(x >= 2, "lpst({x}) is undefined");
    1 << (usize::BITS - 1 - (x - 1).leading_zeros())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DTreeConfig {
    pub root_scale: u32,
    pub data_scale: u32,
}

impl DTreeConfig {
    pub fn new(root_scale: u32, data_scale: u32) -> Self {
        DTreeConfig {
            root_scale,
            data_scale,
        }
    }
}

impl Default for DTreeConfig {
    fn default() -> Self {
        DTreeConfig::new(20, 20)
    }
}

#[derive(Debug)]
pub struct DTree {
    root_set: IndexedHashSet,
    data_set: IndexedHashSet,
}

/// What is already known about the start of a segment being rebuilt: a
/// subtree of the old state covering the first `len` slots of the segment.
#[derive(Clone, Copy)]
enum Prior {
    Absent,
    Half { half: u32, len: usize },
    Node { value: u64, len: usize },
}

fn pack(left: u32, right: u32) -> u64 {
    left as u64 | (right as u64) << 32
}

fn halves(node: u64) -> (u32, u32) {
    (node as u32, (node >> 32) as u32)
}

/// The patches that touch `[lo, hi)`. Patches are sorted and disjoint, so
/// their ends are sorted as well.
fn touching<'p, 'a>(patches: &'p [Patch<'a>], lo: usize, hi: usize) -> &'p [Patch<'a>] {
    let first = patches.partition_point(|p| p.end() <= lo);
    let last = first + patches[first..].partition_point(|p| p.offset < hi);
    &patches[first..last]
}

impl DTree {
    pub fn new(cfg: DTreeConfig) -> Result<Self> {
        if cfg.data_scale > MAX_DATA_SCALE {
            return Err(StoreError::InvalidScale {
                scale: cfg.data_scale,
                min: MIN_SCALE,
                max: MAX_DATA_SCALE,
            });
        }
        if cfg.root_scale > MAX_SCALE {
            return Err(StoreError::InvalidScale {
                scale: cfg.root_scale,
                min: MIN_SCALE,
                max: MAX_SCALE,
            });
        }
        Ok(DTree {
            root_set: IndexedHashSet::new(SetConfig::new(cfg.root_scale))?,
            data_set: IndexedHashSet::new(SetConfig::new(cfg.data_scale))?,
        })
    }

    fn read_data(&self, half: u32) -> Result<u64> {
        Ok(self.data_set.read(half as u64)?.0)
    }

    fn insert_data(&self, node: u64) -> Result<u32> {
        let (index, _) = self.data_set.insert_if_absent(node, 0)?;
        Ok(index as u32)
    }

    /// Value of the top node `id` refers to.
    fn top(&self, id: StateId, root: bool) -> Result<u64> {
        let unknown = StoreError::UnknownId {
            index: id.index(),
            length: id.len() as u32,
        };
        if id.len() == 0 {
            return Err(unknown);
        }
        let found = if root {
            self.root_set.read(id.index()).and_then(|(value, tag)| {
                if tag as usize == id.len() {
                    Ok(value)
                } else {
                    Err(StoreError::Unoccupied(id.index()))
                }
            })
        } else {
            self.data_set.read(id.index()).map(|(value, _)| value)
        };
        found.map_err(|_| unknown)
    }

    fn store_top(&self, node: u64, len: usize, root: bool) -> Result<InsertResult> {
        let (index, is_new) = if root {
            self.root_set.insert_if_absent(node, len as u32)?
        } else {
            self.data_set.insert_if_absent(node, 0)?
        };
        Ok(InsertResult {
            id: StateId::new(index, len),
            is_new,
        })
    }

    /// Inserts the segment `v` bottom-up and returns its half.
    fn insert_half(&self, v: &[Slot]) -> Result<u32> {
        match v.len() {
            1 => Ok(v[0]),
            n => {
                let node = self.insert_node(v, n)?;
                self.insert_data(node)
            }
        }
    }

    fn insert_node(&self, v: &[Slot], n: usize) -> Result<u64> {
        if n == 1 {
            return Ok(v[0] as u64);
        }
        let (left, right) = v.split_at(lpst(n));
        Ok(pack(self.insert_half(left)?, self.insert_half(right)?))
    }

    /// Appends slots `[lo, hi)` of the segment rooted at `node` to `out`.
    fn collect_node(
        &self,
        node: u64,
        len: usize,
        lo: usize,
        hi: usize,
        out: &mut Vec<Slot>,
    ) -> Result<()> {
        if len == 1 {
            out.push(node as u32);
            return Ok(());
        }
        let l = lpst(len);
        let (left, right) = halves(node);
        if lo < l {
            self.collect_half(left, l, lo, hi.min(l), out)?;
        }
        if hi > l {
            self.collect_half(right, len - l, lo.max(l) - l, hi - l, out)?;
        }
        Ok(())
    }

    fn collect_half(
        &self,
        half: u32,
        len: usize,
        lo: usize,
        hi: usize,
        out: &mut Vec<Slot>,
    ) -> Result<()> {
        if len == 1 {
            out.push(half);
            Ok(())
        } else {
            let node = self.read_data(half)?;
            self.collect_node(node, len, lo, hi, out)
        }
    }

    /// Splits what is known about a segment of length `len` between its
    /// children. A prior that fits in the left child stays there whole;
    /// otherwise it is at least as long as the left child, shares its split
    /// point and is opened up.
    fn split_prior(&self, prior: Prior, len: usize) -> Result<(Prior, Prior)> {
        let l = lpst(len);
        let value = match prior {
            Prior::Absent => return Ok((Prior::Absent, Prior::Absent)),
            Prior::Half { len: pl, .. } | Prior::Node { len: pl, .. } if pl <= l => {
                return Ok((prior, Prior::Absent))
            }
            Prior::Half { half, .. } => self.read_data(half)?,
            Prior::Node { value, .. } => value,
        };
        let pl = match prior {
            Prior::Half { len, .. } | Prior::Node { len, .. } => len,
            Prior::Absent => unreachable!(),
        };
        let (left, right) = halves(value);
        Ok((
            Prior::Half { half: left, len: l },
            Prior::Half {
                half: right,
                len: pl - l,
            },
        ))
    }

    /// Builds the half for segment `[start, start + len)` of the new vector.
    /// Untouched subtrees that line up with the old tree are reused as is;
    /// slots past the old state that no patch covers are zero.
    fn rebuild_half(
        &self,
        prior: Prior,
        start: usize,
        len: usize,
        patches: &[Patch<'_>],
    ) -> Result<u32> {
        let patches = touching(patches, start, start + len);
        if let (Prior::Half { half, len: pl }, []) = (prior, patches) {
            if pl == len {
                return Ok(half);
            }
        }
        if len == 1 {
            return Ok(match (patches.first(), prior) {
                (Some(p), _) => p.data[start - p.offset],
                (None, Prior::Half { half, .. }) => half,
                (None, _) => 0,
            });
        }
        let node = self.rebuild_node(prior, start, len, patches)?;
        self.insert_data(node)
    }

    fn rebuild_node(
        &self,
        prior: Prior,
        start: usize,
        len: usize,
        patches: &[Patch<'_>],
    ) -> Result<u64> {
        if len == 1 {
            return Ok(self.rebuild_half(prior, start, 1, patches)? as u64);
        }
        let l = lpst(len);
        let (left_prior, right_prior) = self.split_prior(prior, len)?;
        let left = self.rebuild_half(left_prior, start, l, patches)?;
        let right = self.rebuild_half(right_prior, start + l, len - l, patches)?;
        Ok(pack(left, right))
    }

    fn apply(&self, id: StateId, patches: &[Patch<'_>], root: bool) -> Result<InsertResult> {
        let top = self.top(id, root)?;
        let old_len = id.len();
        let new_len = patches.last().map_or(old_len, |p| p.end().max(old_len));
        check_length(new_len)?;
        let prior = if old_len == 1 {
            Prior::Half {
                half: top as u32,
                len: 1,
            }
        } else {
            Prior::Node {
                value: top,
                len: old_len,
            }
        };
        let node = self.rebuild_node(prior, 0, new_len, patches)?;
        self.store_top(node, new_len, root)
    }

    fn walk(&self, id: StateId, path: &[usize]) -> Result<(StateId, bool)> {
        let mut cur = id;
        let mut root = true;
        for &offset in path {
            let slots = self.get_partial(cur, offset, 2, root)?;
            cur = StateId::from_slots(&slots)?;
            root = false;
        }
        Ok((cur, root))
    }
}

impl StateStore for DTree {
    fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult> {
        check_length(v.len())?;
        let node = self.insert_node(v, v.len())?;
        self.store_top(node, v.len(), root)
    }

    fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        let top = self.top(id, root)?;
        let mut out = Vec::with_capacity(id.len());
        self.collect_node(top, id.len(), 0, id.len(), &mut out)?;
        Ok(out)
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
        let top = self.top(id, root)?;
        let mut out = Vec::with_capacity(length);
        self.collect_node(top, id.len(), offset, offset + length, &mut out)?;
        Ok(out)
    }

    fn delta(&self, id: StateId, offset: usize, d: &[Slot], root: bool) -> Result<InsertResult> {
        if d.is_empty() {
            return Err(StoreError::EmptyDelta(offset));
        }
        check_length(offset + d.len())?;
        self.apply(id, &[Patch { offset, data: d }], root)
    }

    fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult> {
        self.apply(id, &deltas.patches(), root)
    }

    /// Descends through the embedded ids, reading only the two slots of each
    /// one, then reads the requested slice of the innermost state.
    fn get_recursive(&self, id: StateId, path: &[usize], length: usize) -> Result<Vec<Slot>> {
        let (last, interior) = path.split_last().ok_or(StoreError::EmptyPath)?;
        let (inner, root) = self.walk(id, interior)?;
        self.get_partial(inner, *last, length, root)
    }

    /// Rewrites the innermost state with one sparse traversal, then patches
    /// the new embedded id into each enclosing state on the way back up. No
    /// enclosing state is ever materialized.
    fn delta_recursive_sparse(
        &self,
        id: StateId,
        path: &[usize],
        deltas: &SparseDeltaList,
    ) -> Result<InsertResult> {
        let mut chain = Vec::with_capacity(path.len() + 1);
        chain.push(id);
        for (depth, &offset) in path.iter().enumerate() {
            let slots = self.get_partial(chain[depth], offset, 2, depth == 0)?;
            chain.push(StateId::from_slots(&slots)?);
        }
        let mut result = self.apply(chain[path.len()], &deltas.patches(), path.is_empty())?;
        for depth in (0..path.len()).rev() {
            let embedded = result.id.to_slots();
            let patch = Patch {
                offset: path[depth],
                data: &embedded,
            };
            result = self.apply(chain[depth], &[patch], depth == 0)?;
        }
        Ok(result)
    }

    /// Both sets count [`crate::hashset::ENTRY_BYTES`] per occupied entry.
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
