//! Processes held as sub-states of a root state.
//!
//! Root layout: `[n, p0_lo, p0_hi, p1_lo, p1_hi, ...]`, where `p_k` is the
//! embedded id of a non-root process state `[pc, i]`. Every step increments
//! one process's `i` modulo the bound. `pc` stays 1.

use crate::error::Result;
use crate::search::{Model, SearchContext};
use crate::state::{Slot, SparseDeltaList, StateId};
use crate::storage::StateStore;

const PC: Slot = 1;
/// Offset of `i` within a process.
const PROC_I: usize = 1;

fn proc_offset(p: usize) -> usize {
    1 + 2 * p
}

fn initial(ctx: &SearchContext<'_>, n: usize) -> Result<()> {
    let init = ctx.insert(&[PC, 0], false)?.id.to_slots();
    let mut sv = Vec::with_capacity(1 + 2 * n);
    sv.push(n as Slot);
    for _ in 0..n {
        sv.extend_from_slice(&init);
    }
    ctx.insert(&sv, true).map(drop)
}

fn expand(store: &dyn StateStore, s: StateId) -> Result<Vec<Slot>> {
    let sv = store.get(s, true)?;
    let mut out = vec![sv[0]];
    for pair in sv[1..].chunks(2) {
        out.extend(store.get(StateId::from_slots(pair)?, false)?);
    }
    Ok(out)
}

/// Reads the root state, then per process: partial get, sub-state delta and
/// root delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessTreeModel {
    pub processes: usize,
    pub modulus: Slot,
}

impl Default for ProcessTreeModel {
    fn default() -> Self {
        ProcessTreeModel {
            processes: 4,
            modulus: 10,
        }
    }
}

impl Model for ProcessTreeModel {
    fn initial_state(&self, ctx: &SearchContext<'_>) -> Result<()> {
        initial(ctx, self.processes)
    }

    fn next_states(&self, ctx: &SearchContext<'_>, s: StateId) -> Result<()> {
        let sv = ctx.get(s, true)?;
        for p in 0..self.processes {
            let o = proc_offset(p);
            let pid = StateId::from_slots(&sv[o..o + 2])?;
            let i = ctx.get_partial(pid, PROC_I, 1, false)?[0];
            let next = ctx.delta(pid, PROC_I, &[(i + 1) % self.modulus], false)?;
            ctx.delta(s, o, &next.id.to_slots(), true)?;
        }
        Ok(())
    }

    fn canonical(&self, store: &dyn StateStore, s: StateId) -> Result<Vec<Slot>> {
        expand(store, s)
    }
}

/// Same states as [`ProcessTreeModel`], reached with one recursive read and
/// one recursive sparse delta per process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessTreeRecursiveModel {
    pub processes: usize,
    pub modulus: Slot,
}

impl Default for ProcessTreeRecursiveModel {
    fn default() -> Self {
        ProcessTreeRecursiveModel {
            processes: 4,
            modulus: 10,
        }
    }
}

impl Model for ProcessTreeRecursiveModel {
    fn initial_state(&self, ctx: &SearchContext<'_>) -> Result<()> {
        initial(ctx, self.processes)
    }

    fn next_states(&self, ctx: &SearchContext<'_>, s: StateId) -> Result<()> {
        for p in 0..self.processes {
            let o = proc_offset(p);
            let i = ctx.get_recursive(s, &[o, PROC_I], 1)?[0];
            let deltas = SparseDeltaList::single(PROC_I, [(i + 1) % self.modulus])?;
            ctx.delta_recursive_sparse(s, &[o], &deltas)?;
        }
        Ok(())
    }

    fn canonical(&self, store: &dyn StateStore, s: StateId) -> Result<Vec<Slot>> {
        expand(store, s)
    }
}
