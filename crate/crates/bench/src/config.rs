//! Run configuration and its validation.

use std::fmt;
use std::str::FromStr;

use dtree::dtree::MAX_DATA_SCALE;
use dtree::hashset::{MAX_SCALE, MIN_SCALE};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown model `{0}` (expected counters, process_tree, process_tree_recursive or dyn_alloc)")]
    UnknownModel(String),
    #[error("model `{model}` has no parameter `{key}`")]
    UnknownParam { model: &'static str, key: String },
    #[error("model argument `{0}` is not of the form key=value")]
    MalformedArg(String),
    #[error("parameter `{key}` must be in {min}..={max}, got {value}")]
    ParamRange {
        key: String,
        value: u64,
        min: u64,
        max: u64,
    },
    #[error("{which} scale {scale} outside {min}..={max}")]
    Scale {
        which: &'static str,
        scale: u32,
        min: u32,
        max: u32,
    },
    #[error("storage `{0}` needs --pad-length")]
    MissingPadLength(StorageKind),
    #[error("--pad-length only applies to treedbs_pad and treedbs_x_cchm")]
    UnexpectedPadLength,
    #[error("pad length {0} must be at least 2")]
    PadLength(usize),
    #[error("thread count must be at least 1")]
    Threads,
    #[error("scenario line {line}: {reason}")]
    Scenario { line: usize, reason: String },
    #[error("cannot read scenario {path}: {reason}")]
    ScenarioFile { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StorageKind {
    Dtree,
    Cchm,
    #[value(name = "treedbs_pad")]
    TreedbsPad,
    #[value(name = "treedbs_x_cchm")]
    TreedbsXCchm,
}

impl StorageKind {
    pub fn name(self) -> &'static str {
        match self {
            StorageKind::Dtree => "dtree",
            StorageKind::Cchm => "cchm",
            StorageKind::TreedbsPad => "treedbs_pad",
            StorageKind::TreedbsXCchm => "treedbs_x_cchm",
        }
    }

    pub fn is_padded(self) -> bool {
        matches!(self, StorageKind::TreedbsPad | StorageKind::TreedbsXCchm)
    }
}

impl fmt::Display for StorageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Counters { counters: usize, modulus: u32 },
    ProcessTree { n: usize, modulus: u32 },
    ProcessTreeRecursive { n: usize, modulus: u32 },
    DynAlloc { p: usize, k: usize },
}

const MODEL_NAMES: [&str; 4] = [
    "counters",
    "process_tree",
    "process_tree_recursive",
    "dyn_alloc",
];

/// Upper bounds keeping every state within one vector and the space finite
/// in practice.
const MAX_COUNTERS: u64 = 1 << 20;
const MAX_PROCESSES: u64 = 1 << 20;
const MAX_DYN: u64 = 64;

impl ModelSpec {
    /// Default parameters for `name`.
    pub fn named(name: &str) -> Result<Self, ConfigError> {
        match name {
            "counters" => Ok(ModelSpec::Counters {
                counters: 4,
                modulus: 10,
            }),
            "process_tree" => Ok(ModelSpec::ProcessTree { n: 4, modulus: 10 }),
            "process_tree_recursive" => Ok(ModelSpec::ProcessTreeRecursive { n: 4, modulus: 10 }),
            "dyn_alloc" => Ok(ModelSpec::DynAlloc { p: 2, k: 2 }),
            _ => Err(ConfigError::UnknownModel(name.to_string())),
        }
    }

    /// `name` with `key=value` overrides applied.
    pub fn parse(name: &str, args: &[String]) -> Result<Self, ConfigError> {
        let mut spec = Self::named(name)?;
        for arg in args {
            let (key, value) = arg
                .split_once('=')
                .ok_or_else(|| ConfigError::MalformedArg(arg.clone()))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| ConfigError::MalformedArg(arg.clone()))?;
            spec.set(key.trim(), value)?;
        }
        Ok(spec)
    }

    fn set(&mut self, key: &str, value: u64) -> Result<(), ConfigError> {
        let range = |min: u64, max: u64| {
            if (min..=max).contains(&value) {
                Ok(value)
            } else {
                Err(ConfigError::ParamRange {
                    key: key.to_string(),
                    value,
                    min,
                    max,
                })
            }
        };
        let model = self.name();
        match (self, key) {
            (ModelSpec::Counters { counters, .. }, "counters") => {
                *counters = range(1, MAX_COUNTERS)? as usize
            }
            (
                ModelSpec::Counters { modulus, .. }
                | ModelSpec::ProcessTree { modulus, .. }
                | ModelSpec::ProcessTreeRecursive { modulus, .. },
                "modulus",
            ) => *modulus = range(1, u32::MAX as u64)? as u32,
            (ModelSpec::ProcessTree { n, .. } | ModelSpec::ProcessTreeRecursive { n, .. }, "n") => {
                *n = range(1, MAX_PROCESSES)? as usize
            }
            (ModelSpec::DynAlloc { p, .. }, "p") => *p = range(1, MAX_DYN)? as usize,
            (ModelSpec::DynAlloc { k, .. }, "k") => *k = range(0, MAX_DYN)? as usize,
            _ => {
                return Err(ConfigError::UnknownParam {
                    model,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        let i = match self {
            ModelSpec::Counters { .. } => 0,
            ModelSpec::ProcessTree { .. } => 1,
            ModelSpec::ProcessTreeRecursive { .. } => 2,
            ModelSpec::DynAlloc { .. } => 3,
        };
        MODEL_NAMES[i]
    }

    /// Parameters as `;`-separated `key=value` pairs.
    pub fn params(&self) -> String {
        match *self {
            ModelSpec::Counters { counters, modulus } => {
                format!("counters={counters};modulus={modulus}")
            }
            ModelSpec::ProcessTree { n, modulus }
            | ModelSpec::ProcessTreeRecursive { n, modulus } => {
                format!("n={n};modulus={modulus}")
            }
            ModelSpec::DynAlloc { p, k } => format!("p={p};k={k}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::named(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub storage: StorageKind,
    pub scale_root: u32,
    pub scale_data: u32,
    pub scale_sub: u32,
    pub pad_length: Option<usize>,
    pub threads: usize,
    pub format: OutputFormat,
    pub histogram: bool,
}

impl RunConfig {
    pub fn new(model: ModelSpec, storage: StorageKind) -> Self {
        RunConfig {
            model,
            storage,
            scale_root: 20,
            scale_data: 20,
            scale_sub: 20,
            pad_length: None,
            threads: 1,
            format: OutputFormat::Table,
            histogram: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.threads == 0 {
            return Err(ConfigError::Threads);
        }
        let check = |which, scale: u32, max: u32| {
            if (MIN_SCALE..=max).contains(&scale) {
                Ok(())
            } else {
                Err(ConfigError::Scale {
                    which,
                    scale,
                    min: MIN_SCALE,
                    max,
                })
            }
        };
        match self.storage {
            StorageKind::Cchm => check("sub-store", self.scale_sub, MAX_SCALE)?,
            StorageKind::Dtree | StorageKind::TreedbsPad => {
                check("root-set", self.scale_root, MAX_SCALE)?;
                check("data-set", self.scale_data, MAX_DATA_SCALE)?;
            }
            StorageKind::TreedbsXCchm => {
                check("root-set", self.scale_root, MAX_SCALE)?;
                check("data-set", self.scale_data, MAX_DATA_SCALE)?;
                check("sub-store", self.scale_sub, MAX_SCALE)?;
            }
        }
        match (self.storage.is_padded(), self.pad_length) {
            (true, None) => Err(ConfigError::MissingPadLength(self.storage)),
            (true, Some(l)) if l < 2 => Err(ConfigError::PadLength(l)),
            (false, Some(_)) => Err(ConfigError::UnexpectedPadLength),
            _ => Ok(()),
        }
    }
}
