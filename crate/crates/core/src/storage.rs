//! The contract every state store implements.
//!
//! The search core and the benchmark harness only talk to `dyn StateStore`,
//! so the compression tree and the baselines are interchangeable.

use crate::error::{Result, StoreError};
use crate::state::{InsertResult, Slot, SparseDeltaList, StateId};

/// Occupancy and memory figures of a store.
///
/// `memory_bytes` counts occupied entries only; `allocated_bytes` counts
/// everything the store reserved up front. Each store documents its per-entry
/// footprint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub root_occupancy: u64,
    pub data_occupancy: u64,
    pub node_count: u64,
    pub memory_bytes: u64,
    pub allocated_bytes: u64,
}

impl StoreStats {
    pub(crate) fn combine(self, other: StoreStats) -> StoreStats {
        StoreStats {
            root_occupancy: self.root_occupancy + other.root_occupancy,
            data_occupancy: self.data_occupancy + other.data_occupancy,
            node_count: self.node_count + other.node_count,
            memory_bytes: self.memory_bytes + other.memory_bytes,
            allocated_bytes: self.allocated_bytes + other.allocated_bytes,
        }
    }
}

/// A concurrent store of variable-length slot vectors.
///
/// `root` selects the namespace: root states identify model states, non-root
/// states are auxiliary data such as process sub-states. An id is only valid
/// together with the flag it was created under.
pub trait StateStore: Send + Sync {
    fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult>;

    fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>>;

    fn get_partial(
        &self,
        id: StateId,
        offset: usize,
        length: usize,
        root: bool,
    ) -> Result<Vec<Slot>>;

    fn delta(&self, id: StateId, offset: usize, d: &[Slot], root: bool) -> Result<InsertResult>;

    fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult>;

    /// Follows embedded ids at every offset of `path` except the last, then
    /// reads `length` slots at the last offset of the innermost state.
    ///
    /// The outermost state is a root state; every nested one is not.
    fn get_recursive(&self, id: StateId, path: &[usize], length: usize) -> Result<Vec<Slot>> {
        let (last, interior) = path.split_last().ok_or(StoreError::EmptyPath)?;
        let mut cur = id;
        let mut root = true;
        for &offset in interior {
            cur = StateId::from_slots(&self.get_partial(cur, offset, 2, root)?)?;
            root = false;
        }
        self.get_partial(cur, *last, length, root)
    }

    /// Applies `deltas` to the state reached through the embedded ids at
    /// `path`, then rewrites each embedded id on the way back up. With an
    /// empty path this is a root-level `delta_sparse`.
    fn delta_recursive_sparse(
        &self,
        id: StateId,
        path: &[usize],
        deltas: &SparseDeltaList,
    ) -> Result<InsertResult> {
        let mut chain = Vec::with_capacity(path.len() + 1);
        chain.push(id);
        for (depth, &offset) in path.iter().enumerate() {
            let cur = chain[depth];
            chain.push(StateId::from_slots(&self.get_partial(
                cur,
                offset,
                2,
                depth == 0,
            )?)?);
        }
        let mut result = self.delta_sparse(chain[path.len()], deltas, path.is_empty())?;
        for depth in (0..path.len()).rev() {
            result = self.delta(chain[depth], path[depth], &result.id.to_slots(), depth == 0)?;
        }
        Ok(result)
    }

    fn stats(&self) -> StoreStats;
}
