//! Processes appending to a shared, growing heap sub-state.
//!
//! Root layout: `[P, heap_lo, heap_hi]`. The heap is a non-root state
//! `[count, s_1, ..., s_count]` where each `s_j` is `p + 1` for the process
//! `p` that made the j-th append. A process may append at most `K` times.

use crate::error::Result;
use crate::search::{Model, SearchContext};
use crate::state::{DeltaEntry, Slot, SparseDeltaList, StateId};
use crate::storage::StateStore;

const HEAP: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynAllocModel {
    pub processes: usize,
    pub max_appends: usize,
}

impl Default for DynAllocModel {
    fn default() -> Self {
        DynAllocModel {
            processes: 2,
            max_appends: 2,
        }
    }
}

impl Model for DynAllocModel {
    fn initial_state(&self, ctx: &SearchContext<'_>) -> Result<()> {
        let heap = ctx.insert(&[0], false)?.id.to_slots();
        ctx.insert(&[self.processes as Slot, heap[0], heap[1]], true)
            .map(drop)
    }

    fn next_states(&self, ctx: &SearchContext<'_>, s: StateId) -> Result<()> {
        let heap_id = StateId::from_slots(&ctx.get_partial(s, HEAP, 2, true)?)?;
        let heap = ctx.get(heap_id, false)?;
        for p in 0..self.processes {
            let symbol = p as Slot + 1;
            if heap[1..].iter().filter(|&&x| x == symbol).count() >= self.max_appends {
                continue;
            }
            let deltas = SparseDeltaList::new(vec![
                DeltaEntry::new(0, [heap[0] + 1]),
                DeltaEntry::new(heap.len(), [symbol]),
            ])?;
            let grown = ctx.delta_sparse(heap_id, &deltas, false)?;
            ctx.delta(s, HEAP, &grown.id.to_slots(), true)?;
        }
        Ok(())
    }

    fn canonical(&self, store: &dyn StateStore, s: StateId) -> Result<Vec<Slot>> {
        let sv = store.get(s, true)?;
        let mut out = vec![sv[0]];
        out.extend(store.get(StateId::from_slots(&sv[HEAP..HEAP + 2])?, false)?);
        Ok(out)
    }
}
