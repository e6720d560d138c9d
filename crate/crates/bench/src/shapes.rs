//! Scenario files for the layout node-count comparison.
//!
//! One vector per line, slots as comma-separated decimals. Blank lines and
//! lines starting with `#` are skipped. The name `fig34` selects the
//! built-in scenario: a 10-slot vector followed by its 11-slot extension.

use dtree::baseline::{analyze_schema, fig34_scenario, SchemaKind, SchemaReport};
use dtree::Slot;

use crate::config::ConfigError;

pub const BUILTIN: &str = "fig34";

pub fn parse_scenario(text: &str) -> Result<Vec<Vec<Slot>>, ConfigError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line
            .split(',')
            .map(|s| s.trim().parse::<Slot>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::Scenario {
                line: k + 1,
                reason: e.to_string(),
            })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(ConfigError::Scenario {
            line: 0,
            reason: "no vectors".into(),
        });
    }
    Ok(out)
}

/// `source` is a file path or [`BUILTIN`].
pub fn load_scenario(source: &str) -> Result<Vec<Vec<Slot>>, ConfigError> {
    if source == BUILTIN {
        return Ok(fig34_scenario());
    }
    let text = std::fs::read_to_string(source).map_err(|e| ConfigError::ScenarioFile {
        path: source.to_string(),
        reason: e.to_string(),
    })?;
    parse_scenario(&text)
}

pub fn compare(vectors: &[Vec<Slot>]) -> Vec<SchemaReport> {
    SchemaKind::ALL
        .iter()
        .map(|&k| analyze_schema(k, vectors))
        .collect()
}
