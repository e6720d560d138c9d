//! Example models covering every store operation.

pub mod counters;
pub mod dyn_alloc;
pub mod process;

pub use counters::CountersModel;
pub use dyn_alloc::DynAllocModel;
pub use process::{ProcessTreeModel, ProcessTreeRecursiveModel};
