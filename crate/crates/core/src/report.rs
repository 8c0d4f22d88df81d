//! Score reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::measures::Measure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub directed: bool,
    /// Vertices dropped by the largest-component restriction.
    pub dropped_vertices: usize,
    pub side_x: usize,
    pub side_y: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub name: String,
    pub value: f64,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    /// By-products such as conditional probabilities.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

/// All computed scores of one run with the configuration that produced them. Fields
/// serialize in declaration order and maps are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControversyReport {
    pub schema_version: u32,
    pub topic: String,
    pub graph: GraphStats,
    pub measures: Vec<MeasureEntry>,
    pub config: Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ControversyReport {
    pub fn measure(&self, name: &str) -> Option<&MeasureEntry> {
        self.measures.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Header plus one row: topic, graph size and one column per known measure (empty
    /// when not computed).
    pub fn to_csv(&self) -> String {
        let mut header = vec!["topic".to_string(), "vertices".into(), "edges".into()];
        let mut row = vec![csv_field(&self.topic), self.graph.vertices.to_string(), self.graph.edges.to_string()];
        for m in Measure::ALL {
            header.push(m.name().to_string());
            row.push(self.measure(m.name()).map(|e| e.value.to_string()).unwrap_or_default());
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
