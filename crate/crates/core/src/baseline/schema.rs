//! Node-count simulation of the four compression tree layouts.
//!
//! Each vector is decomposed under the chosen layout and its nodes are
//! hash-consed into one table, so shared subtrees are counted once. Top
//! nodes are keyed by vector length as well. Children are tagged as slot or
//! node, so a slot value never aliases a node number.
//!
//! Layouts, for a vector of length `n >= 2`:
//!
//! * `PaperTreedbs`: split into halves, the left half taking the extra slot.
//! * `ImplTreedbs`: array layout, slots in cells `n..2n`, node `i` pairs
//!   cells `2i` and `2i+1`; pairs form from the end of the vector.
//! * `ImplBackwards`: the array layout applied to the reversed vector, so
//!   pairs form from the start.
//! * `DtreeChain`: the left child covers `lpst(n)` slots.
//!
//! A length-1 vector is a single top node in every layout.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::dtree::lpst;
use crate::state::Slot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    PaperTreedbs,
    ImplTreedbs,
    ImplBackwards,
    DtreeChain,
}

impl SchemaKind {
    pub const ALL: [SchemaKind; 4] = [
        SchemaKind::PaperTreedbs,
        SchemaKind::ImplTreedbs,
        SchemaKind::ImplBackwards,
        SchemaKind::DtreeChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemaKind::PaperTreedbs => "paper_treedbs",
            SchemaKind::ImplTreedbs => "impl_treedbs",
            SchemaKind::ImplBackwards => "impl_backwards",
            SchemaKind::DtreeChain => "dtree_chain",
        }
    }
}

impl fmt::Display for SchemaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown schema `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Child {
    Slot(Slot),
    Node(usize),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct NodeKey {
    top_len: Option<usize>,
    left: Child,
    right: Child,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemaStep {
    pub length: usize,
    pub added: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaReport {
    pub kind: SchemaKind,
    pub steps: Vec<SchemaStep>,
}

impl SchemaReport {
    pub fn total(&self) -> usize {
        self.steps.last().map_or(0, |s| s.total)
    }
}

#[derive(Default)]
struct Interner {
    nodes: HashMap<NodeKey, usize>,
}

impl Interner {
    fn intern(&mut self, key: NodeKey) -> usize {
        let next = self.nodes.len();
        *self.nodes.entry(key).or_insert(next)
    }

    fn node(&mut self, left: Child, right: Child) -> Child {
        Child::Node(self.intern(NodeKey {
            top_len: None,
            left,
            right,
        }))
    }

    fn top(&mut self, len: usize, (left, right): (Child, Child)) {
        self.intern(NodeKey {
            top_len: Some(len),
            left,
            right,
        });
    }

    /// Halving layout: the left half gets `ceil(n / 2)` slots.
    fn halves(&mut self, v: &[Slot]) -> Child {
        if v.len() == 1 {
            return Child::Slot(v[0]);
        }
        let (l, r) = v.split_at(v.len().div_ceil(2));
        let (l, r) = (self.halves(l), self.halves(r));
        self.node(l, r)
    }

    fn chain(&mut self, v: &[Slot]) -> Child {
        if v.len() == 1 {
            return Child::Slot(v[0]);
        }
        let (l, r) = v.split_at(lpst(v.len()));
        let (l, r) = (self.chain(l), self.chain(r));
        self.node(l, r)
    }

    /// Array layout; returns the children of the top node.
    fn array(&mut self, v: &[Slot], mirrored: bool) -> (Child, Child) {
        let n = v.len();
        let mut cells = vec![Child::Empty; 2 * n];
        for (k, &slot) in v.iter().enumerate() {
            let pos = if mirrored { 2 * n - 1 - k } else { n + k };
            cells[pos] = Child::Slot(slot);
        }
        let pair = |cells: &[Child], i: usize| {
            if mirrored {
                (cells[2 * i + 1], cells[2 * i])
            } else {
                (cells[2 * i], cells[2 * i + 1])
            }
        };
        for i in (2..n).rev() {
            let (l, r) = pair(&cells, i);
            cells[i] = self.node(l, r);
        }
        pair(&cells, 1)
    }

    fn insert(&mut self, kind: SchemaKind, v: &[Slot]) {
        let n = v.len();
        if n == 1 {
            self.top(1, (Child::Slot(v[0]), Child::Empty));
            return;
        }
        let children = match kind {
            SchemaKind::PaperTreedbs => {
                let (l, r) = v.split_at(n.div_ceil(2));
                (self.halves(l), self.halves(r))
            }
            SchemaKind::DtreeChain => {
                let (l, r) = v.split_at(lpst(n));
                (self.chain(l), self.chain(r))
            }
            SchemaKind::ImplTreedbs => self.array(v, false),
            SchemaKind::ImplBackwards => self.array(v, true),
        };
        self.top(n, children);
    }
}

/// Inserts `vectors` in order under `kind` and reports nodes added per
/// vector and the running total. Empty vectors are skipped.
pub fn analyze_schema(kind: SchemaKind, vectors: &[Vec<Slot>]) -> SchemaReport {
    let mut table = Interner::default();
    let mut steps = Vec::with_capacity(vectors.len());
    for v in vectors.iter().filter(|v| !v.is_empty()) {
        let before = table.nodes.len();
        table.insert(kind, v);
        let total = table.nodes.len();
        steps.push(SchemaStep {
            length: v.len(),
            added: total - before,
            total,
        });
    }
    SchemaReport { kind, steps }
}

/// A 10-slot state followed by the same state with one slot appended.
pub fn fig34_scenario() -> Vec<Vec<Slot>> {
    let ten: Vec<Slot> = (1..=10).collect();
    let eleven: Vec<Slot> = (1..=11).collect();
    vec![ten, eleven]
}
