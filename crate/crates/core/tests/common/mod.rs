//! Oracles and drivers shared by the integration tests and the acceptance
//! target. Nothing here calls library helpers that the tests are meant to
//! check; expected vectors are computed from plain `Vec` arithmetic.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicU32, Ordering};

use dtree::baseline::{CchmStore, FixedTreeStore, TreeDbsHybrid};
use dtree::search::{run, Model, RunOptions};
use dtree::{DTree, DTreeConfig, DeltaEntry, Slot, SparseDeltaList, StateId, StateStore};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const MAX_LEN: usize = 64;

/// Writes `data` at `offset`, growing with zeros as needed.
pub fn overlay_ref(base: &[Slot], offset: usize, data: &[Slot]) -> Vec<Slot> {
    let mut out = base.to_vec();
    let end = offset + data.len();
    while out.len() < end {
        out.push(0);
    }
    for (k, &x) in data.iter().enumerate() {
        out[offset + k] = x;
    }
    out
}

pub fn overlay_all(base: &[Slot], entries: &[(usize, Vec<Slot>)]) -> Vec<Slot> {
    entries
        .iter()
        .fold(base.to_vec(), |acc, (o, d)| overlay_ref(&acc, *o, d))
}

pub fn sparse(entries: &[(usize, Vec<Slot>)]) -> SparseDeltaList {
    SparseDeltaList::new(
        entries
            .iter()
            .map(|(o, d)| DeltaEntry::new(*o, d.clone()))
            .collect(),
    )
    .unwrap()
}

pub fn embed(id: StateId) -> [Slot; 2] {
    let raw = id.raw();
    [raw as Slot, (raw >> 32) as Slot]
}

/// Content-addressed reference: a vector is new exactly once per namespace,
/// and repeated inserts must return the id first handed out.
///
/// With `exact_sub_newness` off, a non-root vector seen for the first time
/// may come back as not new (tree stores share its top node with interior
/// nodes); it must still never be new twice.
#[derive(Default)]
pub struct RefStore {
    ids: HashMap<(bool, Vec<Slot>), StateId>,
    pub exact_sub_newness: bool,
}

impl RefStore {
    /// Checks a store result against the reference and records it.
    pub fn observe(
        &mut self,
        v: &[Slot],
        root: bool,
        id: StateId,
        is_new: bool,
    ) -> Result<(), String> {
        if id.len() != v.len() {
            return Err(format!(
                "id length {} for vector of length {}",
                id.len(),
                v.len()
            ));
        }
        match self.ids.get(&(root, v.to_vec())) {
            Some(&prev) if is_new => Err(format!("{v:?} reported new twice ({prev:?}, {id:?})")),
            Some(&prev) if prev != id => Err(format!("{v:?} changed id {prev:?} -> {id:?}")),
            Some(_) => Ok(()),
            None if !is_new && (root || self.exact_sub_newness) => Err(format!(
                "{v:?} (root={root}) not reported new on first insert"
            )),
            None => {
                self.ids.insert((root, v.to_vec()), id);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}

#[derive(Debug, Clone)]
pub enum Op {
    Insert {
        v: Vec<Slot>,
        root: bool,
    },
    Delta {
        target: usize,
        offset: usize,
        data: Vec<Slot>,
    },
    /// Entries are `(gap from previous end, data)`.
    DeltaSparse {
        target: usize,
        entries: Vec<(usize, Vec<Slot>)>,
    },
    Get {
        target: usize,
    },
    GetPartial {
        target: usize,
        offset: usize,
        len: usize,
    },
}

struct Known {
    id: StateId,
    v: Vec<Slot>,
    root: bool,
}

/// Applies `ops` to `store` and compares every observable with the reference.
pub fn check_ops(
    store: &dyn StateStore,
    ops: &[Op],
    exact_sub_newness: bool,
) -> Result<(), String> {
    let mut reference = RefStore {
        exact_sub_newness,
        ..RefStore::default()
    };
    let mut known: Vec<Known> = Vec::new();
    for (step, op) in ops.iter().enumerate() {
        let fail = |msg: String| format!("op {step} {op:?}: {msg}");
        let target = |t: usize| (!known.is_empty()).then(|| t % known.len());
        let (v, root, result) = match op {
            Op::Insert { v, root } => {
                let r = store.insert(v, *root).map_err(|e| fail(e.to_string()))?;
                (v.clone(), *root, r)
            }
            Op::Delta {
                target: t,
                offset,
                data,
            } => {
                let Some(t) = target(*t) else { continue };
                let k = &known[t];
                let offset = (*offset % (k.v.len() + 4)).min(MAX_LEN - data.len());
                let expected = overlay_ref(&k.v, offset, data);
                let r = store
                    .delta(k.id, offset, data, k.root)
                    .map_err(|e| fail(e.to_string()))?;
                (expected, k.root, r)
            }
            Op::DeltaSparse { target: t, entries } => {
                let Some(t) = target(*t) else { continue };
                let k = &known[t];
                let mut placed = Vec::new();
                let mut end = 0;
                for (gap, d) in entries {
                    let o = end + gap % (k.v.len() + 2);
                    if o + d.len() > MAX_LEN {
                        break;
                    }
                    end = o + d.len();
                    placed.push((o, d.clone()));
                }
                let expected = overlay_all(&k.v, &placed);
                let r = store
                    .delta_sparse(k.id, &sparse(&placed), k.root)
                    .map_err(|e| fail(e.to_string()))?;
                (expected, k.root, r)
            }
            Op::Get { target: t } => {
                let Some(t) = target(*t) else { continue };
                let k = &known[t];
                let got = store.get(k.id, k.root).map_err(|e| fail(e.to_string()))?;
                if got != k.v {
                    return Err(fail(format!("get {got:?}, expected {:?}", k.v)));
                }
                continue;
            }
            Op::GetPartial {
                target: t,
                offset,
                len,
            } => {
                let Some(t) = target(*t) else { continue };
                let k = &known[t];
                let offset = offset % k.v.len();
                let len = 1 + len % (k.v.len() - offset);
                let got = store
                    .get_partial(k.id, offset, len, k.root)
                    .map_err(|e| fail(e.to_string()))?;
                if got[..] != k.v[offset..offset + len] {
                    return Err(fail(format!("get_partial {got:?}")));
                }
                continue;
            }
        };
        reference
            .observe(&v, root, result.id, result.is_new)
            .map_err(fail)?;
        let got = store
            .get(result.id, root)
            .map_err(|e| fail(e.to_string()))?;
        if got != v {
            return Err(fail(format!("stored {got:?}, expected {v:?}")));
        }
        known.push(Known {
            id: result.id,
            v,
            root,
        });
    }
    Ok(())
}

/// Slot values: mostly a tiny alphabet so subtrees are shared, some random
/// words, and (when allowed) the all-ones word.
pub fn random_slot(rng: &mut StdRng, all_ones: bool) -> Slot {
    match rng.random_range(0..10) {
        0..=6 => rng.random_range(0..3),
        7 | 8 => rng.random(),
        _ if all_ones => Slot::MAX,
        _ => rng.random_range(0..Slot::MAX),
    }
}

pub fn random_vec(rng: &mut StdRng, max_len: usize, all_ones: bool) -> Vec<Slot> {
    let len = if rng.random_bool(0.7) {
        rng.random_range(1..=max_len.min(12))
    } else {
        rng.random_range(1..=max_len)
    };
    (0..len).map(|_| random_slot(rng, all_ones)).collect()
}

pub fn random_ops(seed: u64, count: usize, all_ones: bool) -> Vec<Op> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let target = rng.random_range(0..usize::MAX);
            match rng.random_range(0..10) {
                0..=2 => Op::Insert {
                    v: random_vec(&mut rng, MAX_LEN, all_ones),
                    root: rng.random_bool(0.6),
                },
                3..=4 => Op::Delta {
                    target,
                    offset: rng.random_range(0..MAX_LEN),
                    data: random_vec(&mut rng, 8, all_ones),
                },
                5..=6 => Op::DeltaSparse {
                    target,
                    entries: (0..rng.random_range(0..4))
                        .map(|_| {
                            (
                                rng.random_range(0..MAX_LEN),
                                random_vec(&mut rng, 4, all_ones),
                            )
                        })
                        .collect(),
                },
                7 => Op::Get { target },
                _ => Op::GetPartial {
                    target,
                    offset: rng.random_range(0..MAX_LEN),
                    len: rng.random_range(0..MAX_LEN),
                },
            }
        })
        .collect()
}

/// A state whose 2-slot windows at `children` offsets hold embedded ids.
#[derive(Debug, Clone)]
pub struct Nested {
    pub slots: Vec<Slot>,
    pub children: Vec<(usize, Nested)>,
}

/// `Nested` after storing: the exact vector handed to the store.
#[derive(Debug, Clone)]
pub struct Stored {
    pub id: StateId,
    pub vector: Vec<Slot>,
    pub children: Vec<(usize, Stored)>,
}

pub fn random_nested(rng: &mut StdRng, depth: usize) -> Nested {
    let len = rng.random_range(if depth > 0 { 2 } else { 1 }..=16);
    let slots: Vec<Slot> = (0..len).map(|_| random_slot(rng, true)).collect();
    let mut children = Vec::new();
    if depth > 0 {
        let mut o = rng.random_range(0..2);
        while o + 2 <= len && children.len() < 3 {
            children.push((o, random_nested(rng, depth - 1)));
            o += 2 + rng.random_range(0..4);
        }
        if children.is_empty() {
            children.push((0, random_nested(rng, depth - 1)));
        }
    }
    Nested { slots, children }
}

pub fn store_nested(store: &dyn StateStore, n: &Nested, root: bool) -> Stored {
    let children: Vec<(usize, Stored)> = n
        .children
        .iter()
        .map(|(o, c)| (*o, store_nested(store, c, false)))
        .collect();
    let mut vector = n.slots.clone();
    for (o, c) in &children {
        vector[*o..*o + 2].copy_from_slice(&embed(c.id));
    }
    let id = store.insert(&vector, root).unwrap().id;
    Stored {
        id,
        vector,
        children,
    }
}

/// Checks one recursive read and one recursive sparse delta on a random
/// nested state against a manual composition of single-level operations and
/// against the vectors computed directly.
pub fn check_recursive(store: &dyn StateStore, rng: &mut StdRng) -> Result<(), String> {
    let depth = rng.random_range(0..=2);
    let top = store_nested(store, &random_nested(rng, depth), true);

    // descend through 0..=depth embedded ids
    let mut chain = vec![&top];
    let mut path = Vec::new();
    while !chain.last().unwrap().children.is_empty() && rng.random_bool(0.8) {
        let node = chain.last().unwrap();
        let (o, child) = &node.children[rng.random_range(0..node.children.len())];
        path.push(*o);
        chain.push(child);
    }
    let inner = chain.last().unwrap();

    let offset = rng.random_range(0..inner.vector.len());
    let len = rng.random_range(1..=inner.vector.len() - offset);
    let mut full_path = path.clone();
    full_path.push(offset);
    let got = store
        .get_recursive(top.id, &full_path, len)
        .map_err(|e| e.to_string())?;
    if got[..] != inner.vector[offset..offset + len] {
        return Err(format!("get_recursive {full_path:?}: {got:?}"));
    }
    let mut ids = vec![top.id];
    for (depth, &o) in path.iter().enumerate() {
        let slots = store.get_partial(ids[depth], o, 2, depth == 0).unwrap();
        ids.push(StateId::from_slots(&slots).unwrap());
    }
    let cur = *ids.last().unwrap();
    let composed = store
        .get_partial(cur, offset, len, path.is_empty())
        .unwrap();
    if composed != got {
        return Err("get_recursive differs from composed reads".into());
    }

    let mut entries = Vec::new();
    let mut end = 0;
    for _ in 0..rng.random_range(0..4) {
        let o = end + rng.random_range(0..inner.vector.len() + 2);
        let d: Vec<Slot> = (0..rng.random_range(1..=4))
            .map(|_| random_slot(rng, true))
            .collect();
        end = o + d.len();
        entries.push((o, d));
    }

    // expected vectors bottom-up; nested states are never root states
    let mut expected = overlay_all(&inner.vector, &entries);
    for level in (0..path.len()).rev() {
        let child = store
            .insert(&expected, false)
            .map_err(|e| e.to_string())?
            .id;
        expected = overlay_ref(&chain[level].vector, path[level], &embed(child));
    }
    let result = store
        .delta_recursive_sparse(top.id, &path, &sparse(&entries))
        .map_err(|e| e.to_string())?;
    let stored = store.get(result.id, true).map_err(|e| e.to_string())?;
    if stored != expected {
        return Err(format!(
            "delta_recursive_sparse {path:?} {entries:?}: {stored:?} != {expected:?}"
        ));
    }

    let mut id = store
        .delta_sparse(cur, &sparse(&entries), path.is_empty())
        .unwrap()
        .id;
    for level in (0..path.len()).rev() {
        id = store
            .delta(ids[level], path[level], &embed(id), level == 0)
            .unwrap()
            .id;
    }
    if id != result.id {
        return Err("delta_recursive_sparse differs from composed deltas".into());
    }
    Ok(())
}

/// Number of sequences over `p` symbols using each symbol at most `k` times.
pub fn append_sequences(p: usize, k: usize) -> u64 {
    fn count(used: &mut Vec<usize>, k: usize) -> u64 {
        let mut total = 1;
        for s in 0..used.len() {
            if used[s] < k {
                used[s] += 1;
                total += count(used, k);
                used[s] -= 1;
            }
        }
        total
    }
    count(&mut vec![0; p], k)
}

pub fn dtree(scale: u32) -> DTree {
    DTree::new(DTreeConfig::new(scale, scale)).unwrap()
}

/// Every storage, configured for states of at most `pad` slots.
pub fn all_stores(pad: usize) -> Vec<(&'static str, Box<dyn StateStore>)> {
    vec![
        ("dtree", Box::new(dtree(18))),
        ("cchm", Box::new(CchmStore::new())),
        (
            "treedbs_pad",
            Box::new(FixedTreeStore::new(pad, 18, 18).unwrap()),
        ),
        (
            "treedbs_x_cchm",
            Box::new(TreeDbsHybrid::new(pad, 18, 18, 16).unwrap()),
        ),
    ]
}

/// Sorted canonical dumps of all visited root states.
pub fn dump<M: Model + ?Sized>(
    model: &M,
    store: &dyn StateStore,
    threads: usize,
) -> Vec<Vec<Slot>> {
    let stats = run(model, store, &RunOptions::threads(threads).recording()).unwrap();
    let mut out: Vec<Vec<Slot>> = stats
        .visited
        .iter()
        .map(|&s| model.canonical(store, s).unwrap())
        .collect();
    out.sort();
    out
}

/// All vectors in a shared pool inserted by `threads` threads, each in its
/// own order; returns how often each vector was reported new.
pub fn newness_counts(store: &dyn StateStore, pool: &[Vec<Slot>], threads: usize) -> Vec<u32> {
    let wins: Vec<AtomicU32> = pool.iter().map(|_| AtomicU32::new(0)).collect();
    std::thread::scope(|scope| {
        for t in 0..threads {
            let wins = &wins;
            scope.spawn(move || {
                let mut order: Vec<usize> = (0..pool.len()).collect();
                order.shuffle(&mut StdRng::seed_from_u64(t as u64));
                for i in order {
                    if store.insert(&pool[i], true).unwrap().is_new {
                        wins[i].fetch_add(1, Ordering::Relaxed);
                    }
                }
            });
        }
    });
    wins.into_iter().map(AtomicU32::into_inner).collect()
}

/// `count` distinct vectors of varying length.
pub fn distinct_pool(seed: u64, count: usize) -> Vec<Vec<Slot>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    while seen.len() < count {
        seen.insert(random_vec(&mut rng, 24, true));
    }
    let mut pool: Vec<_> = seen
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    pool.shuffle(&mut rng);
    pool
}
