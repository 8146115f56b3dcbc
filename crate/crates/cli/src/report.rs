use std::fmt::Write as _;

use ads3::suite::{Check, Status};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub group: Option<String>,
    pub point: Option<[f64; 4]>,
    pub other: Option<[f64; 4]>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub format: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub config: ConfigEcho,
    pub group: String,
    pub results: Vec<Value>,
    pub checks: Vec<Check>,
    /// Pre-rendered markdown for the results section, when a table reads better.
    #[serde(skip)]
    pub md_results: Option<String>,
}

impl Report {
    pub fn new(config: ConfigEcho) -> Self {
        let group = config.group.clone().unwrap_or_else(|| "all".into());
        Report { tool_version: env!("CARGO_PKG_VERSION"), config, group, results: vec![], checks: vec![], md_results: None }
    }

    pub fn push<T: Serialize>(&mut self, result: &T) {
        self.results.push(serde_json::to_value(result).expect("report values serialize"));
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# ads3 {}\n", self.config.command);
        let _ = writeln!(out, "- tool_version: {}", self.tool_version);
        let _ = writeln!(out, "- group: {}\n", self.group);
        let _ = writeln!(out, "## config\n\n| key | value |\n|---|---|");
        if let Value::Object(map) = serde_json::to_value(&self.config).expect("config serializes") {
            for (k, v) in map {
                let _ = writeln!(out, "| {k} | {} |", inline(&v));
            }
        }
        let _ = writeln!(out, "\n## results\n");
        match &self.md_results {
            Some(table) => out.push_str(table),
            None => {
                for r in &self.results {
                    let _ = writeln!(out, "```json\n{}\n```\n", serde_json::to_string_pretty(r).unwrap_or_default());
                }
            }
        }
        let _ = writeln!(out, "\n## checks\n");
        if self.checks.is_empty() {
            let _ = writeln!(out, "none");
        } else {
            let _ = writeln!(out, "| name | status | margin |\n|---|---|---|");
            for c in &self.checks {
                let status = serde_json::to_value(c.status).ok().map(|v| inline(&v)).unwrap_or_default();
                let _ = writeln!(out, "| {} | {} | {:e} |", c.name, status, c.margin);
            }
        }
        out
    }
}

pub fn inline(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A markdown table from flat JSON objects, columns in first-row order.
pub fn md_table(rows: &[Value]) -> String {
    let Some(Value::Object(first)) = rows.first() else { return String::new() };
    let cols: Vec<&String> = first.keys().collect();
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(cols.len()));
    for row in rows {
        let cells: Vec<String> = cols.iter().map(|c| row.get(c.as_str()).map(inline).unwrap_or_default()).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}
