//! CSV document assembly: `#`-prefixed metadata header (tool version,
//! config echo, seed), a column header row with units in the names, then
//! data rows. Rendering is fully deterministic so identical (config, seed)
//! pairs produce byte-identical artifacts.

use crate::config::ScenarioConfig;

pub struct CsvDoc {
    meta: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(config: &ScenarioConfig, seed: u64, columns: &[&str]) -> Self {
        let mut meta = vec![
            format!("collapse-photons {}", env!("CARGO_PKG_VERSION")),
            format!("scenario = {}", config.kind),
            format!("seed = {seed}"),
        ];
        for line in config.echo() {
            meta.push(format!("config: {line}"));
        }
        Self {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        self.rows.push(values.iter().map(|&v| fmt_num(v)).collect());
    }

    /// Row with an explicit trailing flag column (e.g. validity 0/1).
    pub fn push_row_raw(&mut self, values: Vec<String>) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        self.rows.push(values);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.meta {
            out.push_str("# ");
            out.push_str(m);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest-roundtrip float formatting (Rust's `{}` for f64 is exact on
/// re-parse), stable across runs and platforms.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}
