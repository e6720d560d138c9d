//! Concurrent storage for variable-length state vectors with tree
//! compression, comparison stores, and a parallel breadth-first search that
//! runs on any of them.
//!
//! ```
//! use dtree::models::CountersModel;
//! use dtree::search::{run, RunOptions};
//! use dtree::{DTree, DTreeConfig, StateStore};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let store = DTree::new(DTreeConfig::new(20, 20))?;
//! let id = store.insert(&[1, 2, 3, 4, 5, 6], true)?.id;
//! let grown = store.delta(id, 8, &[7, 8], true)?;
//! assert_eq!(store.get(grown.id, true)?, [1, 2, 3, 4, 5, 6, 0, 0, 7, 8]);
//!
//! let stats = run(&CountersModel::default(), &DTree::new(DTreeConfig::default())?, &RunOptions::threads(4))?;
//! assert_eq!(stats.visited_roots, 10_000);
//! # Ok(())
//! # }
//! ```

pub mod baseline;
pub mod dtree;
pub mod error;
pub mod hashset;
pub mod models;
pub mod search;
pub mod state;
pub mod storage;

pub use dtree::{DTree, DTreeConfig};
pub use error::{Result, StoreError};
pub use hashset::{IndexedHashSet, SetConfig};
pub use search::{run, Model, RunOptions, SearchAbort, SearchContext, SearchStats};
pub use state::{DeltaEntry, InsertResult, Slot, SparseDeltaList, StateId};
pub use storage::{StateStore, StoreStats};
