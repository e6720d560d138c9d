//! Executes a validated configuration.

use dtree::baseline::{CchmStore, FixedTreeStore, TreeDbsHybrid};
use dtree::models::{CountersModel, DynAllocModel, ProcessTreeModel, ProcessTreeRecursiveModel};
use dtree::search::{run, RunOptions, SearchStats};
use dtree::{DTree, DTreeConfig, Model, StateStore, StoreError};

use crate::config::{ModelSpec, RunConfig, StorageKind};
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Failed = 1,
    InvalidConfig = 2,
    CapacityExhausted = 3,
    Incompatible = 4,
}

impl ExitCode {
    pub fn for_error(e: &StoreError) -> Self {
        match e {
            StoreError::InvalidScale { .. } => ExitCode::InvalidConfig,
            StoreError::CapacityExhausted | StoreError::Alloc { .. } => ExitCode::CapacityExhausted,
            StoreError::ReservedValueCollision
            | StoreError::VectorTooLong { .. }
            | StoreError::LengthOutOfRange(_) => ExitCode::Incompatible,
            _ => ExitCode::Failed,
        }
    }
}

/// Result of [`execute`]: the report (absent if no search ran), the exit
/// code and the error message, if any.
#[derive(Debug)]
pub struct Execution {
    pub report: Option<RunReport>,
    pub code: ExitCode,
    pub error: Option<String>,
}

pub fn build_store(cfg: &RunConfig) -> Result<Box<dyn StateStore>, StoreError> {
    let pad = cfg.pad_length.unwrap_or(0);
    Ok(match cfg.storage {
        StorageKind::Dtree => Box::new(DTree::new(DTreeConfig::new(
            cfg.scale_root,
            cfg.scale_data,
        ))?),
        StorageKind::Cchm => Box::new(CchmStore::with_capacity(1 << cfg.scale_sub)),
        StorageKind::TreedbsPad => {
            Box::new(FixedTreeStore::new(pad, cfg.scale_root, cfg.scale_data)?)
        }
        StorageKind::TreedbsXCchm => Box::new(TreeDbsHybrid::new(
            pad,
            cfg.scale_root,
            cfg.scale_data,
            cfg.scale_sub,
        )?),
    })
}

pub fn build_model(spec: &ModelSpec) -> Box<dyn Model> {
    match *spec {
        ModelSpec::Counters { counters, modulus } => Box::new(CountersModel { counters, modulus }),
        ModelSpec::ProcessTree { n, modulus } => Box::new(ProcessTreeModel {
            processes: n,
            modulus,
        }),
        ModelSpec::ProcessTreeRecursive { n, modulus } => Box::new(ProcessTreeRecursiveModel {
            processes: n,
            modulus,
        }),
        ModelSpec::DynAlloc { p, k } => Box::new(DynAllocModel {
            processes: p,
            max_appends: k,
        }),
    }
}

pub fn execute(cfg: &RunConfig) -> Execution {
    if let Err(e) = cfg.validate() {
        return Execution {
            report: None,
            code: ExitCode::InvalidConfig,
            error: Some(e.to_string()),
        };
    }
    let store = match build_store(cfg) {
        Ok(s) => s,
        Err(e) => {
            return Execution {
                report: None,
                code: ExitCode::for_error(&e),
                error: Some(e.to_string()),
            }
        }
    };
    let model = build_model(&cfg.model);
    let (stats, error): (SearchStats, Option<StoreError>) = match run(
        model.as_ref(),
        store.as_ref(),
        &RunOptions::threads(cfg.threads),
    ) {
        Ok(stats) => (stats, None),
        Err(abort) => (abort.stats, Some(abort.error)),
    };
    let code = error
        .as_ref()
        .map_or(ExitCode::Success, ExitCode::for_error);
    let message = error.map(|e| e.to_string());
    Execution {
        report: Some(RunReport::new(cfg, &stats, message.clone())),
        code,
        error: message,
    }
}
