//! Parallel breadth-first reachability over any [`StateStore`].
//!
//! Models never see the queue. They upload successors through a
//! [`SearchContext`], which forwards to the store and enqueues every root
//! state the store reports as new. Each worker owns a context; new ids are
//! buffered locally and handed to the shared FIFO in one batch after each
//! expansion.
//!
//! Termination: the queue, the number of workers currently expanding a
//! state, and the `done` flag share one mutex. A worker that finds the queue
//! empty while no one else is expanding declares quiescence, since only an
//! expanding worker can produce new work.

use std::cell::RefCell;
use std::collections::{BTreeMap, VecDeque};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::error::{Result, StoreError};
use crate::state::{InsertResult, Slot, SparseDeltaList, StateId};
use crate::storage::{StateStore, StoreStats};

/// A state space to explore.
///
/// `next_states` may run concurrently for distinct states; all state must
/// flow through the context.
pub trait Model: Sync {
    fn initial_state(&self, ctx: &SearchContext<'_>) -> Result<()>;

    fn next_states(&self, ctx: &SearchContext<'_>, s: StateId) -> Result<()>;

    /// A store-independent rendering of a root state, used to compare runs.
    /// Models that embed sub-state ids should expand them here.
    fn canonical(&self, store: &dyn StateStore, s: StateId) -> Result<Vec<Slot>> {
        store.get(s, true)
    }
}

/// Insert counts per `(length, root)` over every insert-like result.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LengthHistogram(BTreeMap<(usize, bool), u64>);

impl LengthHistogram {
    pub fn record(&mut self, length: usize, root: bool) {
        *self.0.entry((length, root)).or_default() += 1;
    }

    pub fn merge(&mut self, other: &LengthHistogram) {
        for (&key, &count) in &other.0 {
            *self.0.entry(key).or_default() += count;
        }
    }

    pub fn count(&self, length: usize, root: bool) -> u64 {
        self.0.get(&(length, root)).copied().unwrap_or(0)
    }

    /// `(length, root, count)` rows ordered by length, sub-states first.
    pub fn rows(&self) -> impl Iterator<Item = (usize, bool, u64)> + '_ {
        self.0
            .iter()
            .map(|(&(len, root), &count)| (len, root, count))
    }

    pub fn lengths(&self, root: bool) -> Vec<usize> {
        self.rows().filter(|r| r.1 == root).map(|r| r.0).collect()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

#[derive(Debug, Default)]
struct Tally {
    visited_roots: u64,
    transitions: u64,
    histogram: LengthHistogram,
    visited: Vec<StateId>,
}

/// Store wrapper handed to models.
pub struct SearchContext<'a> {
    store: &'a dyn StateStore,
    expanding: bool,
    record_visited: bool,
    pending: RefCell<Vec<StateId>>,
    tally: RefCell<Tally>,
}

impl<'a> SearchContext<'a> {
    /// A context outside any search; new root states accumulate in
    /// [`SearchContext::queued`].
    pub fn new(store: &'a dyn StateStore) -> Self {
        Self::with_flags(store, false, false)
    }

    fn with_flags(store: &'a dyn StateStore, expanding: bool, record_visited: bool) -> Self {
        SearchContext {
            store,
            expanding,
            record_visited,
            pending: RefCell::default(),
            tally: RefCell::default(),
        }
    }

    pub fn store(&self) -> &'a dyn StateStore {
        self.store
    }

    /// Root states enqueued through this context and not yet handed off.
    pub fn queued(&self) -> Vec<StateId> {
        self.pending.borrow().clone()
    }

    fn record(&self, result: InsertResult, root: bool) -> InsertResult {
        let mut tally = self.tally.borrow_mut();
        tally.histogram.record(result.id.len(), root);
        if root && self.expanding {
            tally.transitions += 1;
        }
        if result.is_new && root {
            tally.visited_roots += 1;
            if self.record_visited {
                tally.visited.push(result.id);
            }
            self.pending.borrow_mut().push(result.id);
        }
        result
    }

    pub fn insert(&self, v: &[Slot], root: bool) -> Result<InsertResult> {
        let r = self.store.insert(v, root)?;
        Ok(self.record(r, root))
    }

    pub fn delta(
        &self,
        id: StateId,
        offset: usize,
        d: &[Slot],
        root: bool,
    ) -> Result<InsertResult> {
        let r = self.store.delta(id, offset, d, root)?;
        Ok(self.record(r, root))
    }

    pub fn delta_sparse(
        &self,
        id: StateId,
        deltas: &SparseDeltaList,
        root: bool,
    ) -> Result<InsertResult> {
        let r = self.store.delta_sparse(id, deltas, root)?;
        Ok(self.record(r, root))
    }

    /// The returned state is a root state and is enqueued when new.
    pub fn delta_recursive_sparse(
        &self,
        id: StateId,
        path: &[usize],
        deltas: &SparseDeltaList,
    ) -> Result<InsertResult> {
        let r = self.store.delta_recursive_sparse(id, path, deltas)?;
        Ok(self.record(r, true))
    }

    pub fn get(&self, id: StateId, root: bool) -> Result<Vec<Slot>> {
        self.store.get(id, root)
    }

    pub fn get_partial(
        &self,
        id: StateId,
        offset: usize,
        length: usize,
        root: bool,
    ) -> Result<Vec<Slot>> {
        self.store.get_partial(id, offset, length, root)
    }

    pub fn get_recursive(&self, id: StateId, path: &[usize], length: usize) -> Result<Vec<Slot>> {
        self.store.get_recursive(id, path, length)
    }

    fn into_tally(self) -> Tally {
        self.tally.into_inner()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub threads: usize,
    /// Keep the ids of all visited root states in [`SearchStats::visited`].
    pub record_visited: bool,
}

impl RunOptions {
    pub fn threads(threads: usize) -> Self {
        RunOptions {
            threads,
            record_visited: false,
        }
    }

    pub fn recording(mut self) -> Self {
        self.record_visited = true;
        self
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions::threads(1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub visited_roots: u64,
    pub transitions: u64,
    pub wall_time: Duration,
    pub storage: StoreStats,
    pub histogram: LengthHistogram,
    pub visited: Vec<StateId>,
}

impl SearchStats {
    fn absorb(&mut self, tally: Tally) {
        self.visited_roots += tally.visited_roots;
        self.transitions += tally.transitions;
        self.histogram.merge(&tally.histogram);
        self.visited.extend(tally.visited);
    }
}

/// A run stopped by a store or model error, with what was gathered so far.
#[derive(Debug, Clone)]
pub struct SearchAbort {
    pub error: StoreError,
    pub stats: SearchStats,
}

impl std::fmt::Display for SearchAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "search aborted after {} states: {}",
            self.stats.visited_roots, self.error
        )
    }
}

impl std::error::Error for SearchAbort {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

#[derive(Default)]
struct QueueState {
    items: VecDeque<StateId>,
    active: usize,
    done: bool,
}

#[derive(Default)]
struct Shared {
    queue: Mutex<QueueState>,
    ready: Condvar,
    failure: Mutex<Option<StoreError>>,
}

impl Shared {
    fn fail(&self, error: StoreError) {
        self.failure.lock().unwrap().get_or_insert(error);
        self.queue.lock().unwrap().done = true;
        self.ready.notify_all();
    }
}

fn worker<M: Model + ?Sized>(model: &M, shared: &Shared, ctx: SearchContext<'_>) -> Tally {
    let mut expanded = false;
    loop {
        let next = {
            let mut q = shared.queue.lock().unwrap();
            let batch = std::mem::take(&mut *ctx.pending.borrow_mut());
            let pushed = batch.len();
            q.items.extend(batch);
            if expanded {
                q.active -= 1;
            }
            match pushed {
                0 => {}
                1 => shared.ready.notify_one(),
                _ => shared.ready.notify_all(),
            }
            loop {
                if q.done {
                    break None;
                }
                if let Some(id) = q.items.pop_front() {
                    q.active += 1;
                    break Some(id);
                }
                if q.active == 0 {
                    q.done = true;
                    shared.ready.notify_all();
                    break None;
                }
                q = shared.ready.wait(q).unwrap();
            }
        };
        let Some(id) = next else {
            return ctx.into_tally();
        };
        expanded = true;
        if let Err(e) = model.next_states(&ctx, id) {
            shared.fail(e);
            return ctx.into_tally();
        }
    }
}

/// Explores every state reachable from the model's initial state.
///
/// # Panics
///
/// If `opts.threads` is zero.
#[allow(clippy::result_large_err)]
pub fn run<M: Model + ?Sized>(
    model: &M,
    store: &dyn StateStore,
    opts: &RunOptions,
) -> std::result::Result<SearchStats, SearchAbort> {
    assert!(opts.threads >= 1, "a search needs at least one worker");
    let start = Instant::now();
    let shared = Shared::default();
    let mut stats = SearchStats::default();

    let init = SearchContext::with_flags(store, false, opts.record_visited);
    match model.initial_state(&init) {
        Ok(()) => {
            let mut q = shared.queue.lock().unwrap();
            q.items.extend(init.pending.borrow_mut().drain(..));
        }
        Err(e) => shared.fail(e),
    }
    stats.absorb(init.into_tally());

    let tallies: Vec<Tally> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..opts.threads)
            .map(|_| {
                let ctx = SearchContext::with_flags(store, true, opts.record_visited);
                let shared = &shared;
                scope.spawn(move || worker(model, shared, ctx))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for tally in tallies {
        stats.absorb(tally);
    }
    stats.wall_time = start.elapsed();
    stats.storage = store.stats();

    match shared.failure.into_inner().unwrap() {
        Some(error) => Err(SearchAbort { error, stats }),
        None => Ok(stats),
    }
}
