//! Comparison stores and the layout node-count analyzer.

pub mod cchm;
pub mod schema;
pub mod treedbs;

pub use cchm::CchmStore;
pub use schema::{analyze_schema, fig34_scenario, SchemaKind, SchemaReport, SchemaStep};
pub use treedbs::{FixedTreeStore, TreeDbsHybrid};
