//! Run reports and their table, JSON and CSV renderings.
//!
//! JSON output is one object per line with a `record` field: `run`, `hist`
//! or `shape`. CSV output repeats that layout as header/row blocks.

use std::fmt::Write;

use dtree::baseline::SchemaReport;
use dtree::search::SearchStats;
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub model: String,
    pub params: String,
    pub storage: String,
    pub scale_root: u32,
    pub scale_data: u32,
    pub scale_sub: u32,
    pub pad_length: Option<usize>,
    pub threads: usize,
    pub visited_roots: u64,
    pub transitions: u64,
    pub inserts: u64,
    pub wall_time_s: f64,
    pub root_occupancy: u64,
    pub data_occupancy: u64,
    pub total_node_count: u64,
    pub memory_bytes: u64,
    pub allocated_bytes: u64,
    /// Occupied bytes per visited root state.
    pub bytes_per_state: f64,
    /// Reserved bytes per visited root state.
    pub bytes_per_state_allocated: f64,
    /// Occupied bytes per insert-like operation.
    pub bytes_per_insert: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub histogram: Vec<HistRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistRow {
    pub length: usize,
    pub root: bool,
    pub count: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl RunReport {
    pub fn new(cfg: &RunConfig, stats: &SearchStats, error: Option<String>) -> Self {
        let s = &stats.storage;
        let inserts = stats.histogram.total();
        RunReport {
            model: cfg.model.name().to_string(),
            params: cfg.model.params(),
            storage: cfg.storage.name().to_string(),
            scale_root: cfg.scale_root,
            scale_data: cfg.scale_data,
            scale_sub: cfg.scale_sub,
            pad_length: cfg.pad_length,
            threads: cfg.threads,
            visited_roots: stats.visited_roots,
            transitions: stats.transitions,
            inserts,
            wall_time_s: stats.wall_time.as_secs_f64(),
            root_occupancy: s.root_occupancy,
            data_occupancy: s.data_occupancy,
            total_node_count: s.node_count,
            memory_bytes: s.memory_bytes,
            allocated_bytes: s.allocated_bytes,
            bytes_per_state: ratio(s.memory_bytes, stats.visited_roots),
            bytes_per_state_allocated: ratio(s.allocated_bytes, stats.visited_roots),
            bytes_per_insert: ratio(s.memory_bytes, inserts),
            error,
            histogram: stats
                .histogram
                .rows()
                .map(|(length, root, count)| HistRow {
                    length,
                    root,
                    count,
                })
                .collect(),
        }
    }

    /// Field names and rendered values in declaration order.
    fn fields(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("report serializes");
        value
            .as_object()
            .expect("report is an object")
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    serde_json::Value::Null => String::new(),
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect()
    }

    pub fn render(&self, format: OutputFormat, histogram: bool) -> String {
        let hist: &[HistRow] = if histogram { &self.histogram } else { &[] };
        match format {
            OutputFormat::Table => self.table(hist),
            OutputFormat::Json => self.json(hist),
            OutputFormat::Csv => self.csv(hist),
        }
    }

    fn table(&self, hist: &[HistRow]) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            if !v.is_empty() {
                writeln!(out, "{k:<26}{v}").unwrap();
            }
        }
        if !hist.is_empty() {
            writeln!(out, "\n{:>10} {:>6} {:>12}", "length", "root", "count").unwrap();
            for h in hist {
                writeln!(out, "{:>10} {:>6} {:>12}", h.length, h.root, h.count).unwrap();
            }
        }
        out
    }

    fn json(&self, hist: &[HistRow]) -> String {
        let mut out = String::new();
        writeln!(out, "{}", tagged("run", self)).unwrap();
        for h in hist {
            writeln!(out, "{}", tagged("hist", h)).unwrap();
        }
        out
    }

    fn csv(&self, hist: &[HistRow]) -> String {
        let fields = self.fields();
        let mut out = String::new();
        let names: Vec<&str> = fields.iter().map(|f| f.0.as_str()).collect();
        let values: Vec<String> = fields.iter().map(|f| csv_field(&f.1)).collect();
        writeln!(out, "record,{}", names.join(",")).unwrap();
        writeln!(out, "run,{}", values.join(",")).unwrap();
        if !hist.is_empty() {
            writeln!(out, "record,length,root,count").unwrap();
            for h in hist {
                writeln!(out, "hist,{},{},{}", h.length, h.root, h.count).unwrap();
            }
        }
        out
    }
}

/// `value` as a JSON object with a leading `record` field.
fn tagged(record: &str, value: &impl Serialize) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("record".into(), record.into());
    if let serde_json::Value::Object(fields) =
        serde_json::to_value(value).expect("record serializes")
    {
        map.extend(fields);
    }
    serde_json::Value::Object(map)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct ShapeRow<'a> {
    schema: &'a str,
    step: usize,
    length: usize,
    added: usize,
    total: usize,
}

fn shape_rows(reports: &[SchemaReport]) -> impl Iterator<Item = ShapeRow<'_>> {
    reports.iter().flat_map(|r| {
        r.steps.iter().enumerate().map(move |(i, s)| ShapeRow {
            schema: r.kind.name(),
            step: i + 1,
            length: s.length,
            added: s.added,
            total: s.total,
        })
    })
}

pub fn render_shapes(reports: &[SchemaReport], format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Table => {
            writeln!(
                out,
                "{:<16} {:>5} {:>7} {:>7} {:>7}",
                "schema", "step", "length", "added", "total"
            )
            .unwrap();
            for r in shape_rows(reports) {
                writeln!(
                    out,
                    "{:<16} {:>5} {:>7} {:>7} {:>7}",
                    r.schema, r.step, r.length, r.added, r.total
                )
                .unwrap();
            }
        }
        OutputFormat::Json => {
            for r in shape_rows(reports) {
                writeln!(out, "{}", tagged("shape", &r)).unwrap();
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "record,schema,step,length,added,total").unwrap();
            for r in shape_rows(reports) {
                writeln!(
                    out,
                    "shape,{},{},{},{},{}",
                    r.schema, r.step, r.length, r.added, r.total
                )
                .unwrap();
            }
        }
    }
    out
}
