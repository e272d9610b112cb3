use std::io::Write;

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    /// Rendered verbatim in CSV/text ("ND", "NA"); `null` in JSON.
    Missing(&'static str),
}

impl Cell {
    pub fn opt_num(v: Option<f64>, marker: &'static str) -> Cell {
        v.map_or(Cell::Missing(marker), Cell::Num)
    }

    pub fn opt_int(v: Option<u64>, marker: &'static str) -> Cell {
        v.map_or(Cell::Missing(marker), Cell::Int)
    }

    fn plain(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing(m) => (*m).to_string(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Num(v) if v.abs() >= 1e-3 || *v == 0.0 => {
                let s = format!("{v:.6}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            }
            Cell::Num(v) => format!("{v:.4e}"),
            other => other.plain(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing(_) => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Result of one command, ready to render.
pub struct Output {
    pub config: RunConfig,
    pub table: Table,
    /// Replaces the table rows as `results` in JSON output.
    pub json: Option<Value>,
    pub warnings: Vec<String>,
    /// One message per requested quantity that has no solution.
    pub unsolved: Vec<String>,
}

impl Output {
    pub fn render<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let config = serde_json::to_value(&self.config).expect("config serializes");
        match self.config.format {
            Format::Json => {
                let doc = json!({
                    "config": config,
                    "results": self.json.clone().unwrap_or_else(|| self.table.json_rows()),
                    "warnings": self.warnings,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
            }
            Format::Csv => {
                writeln!(out, "# config {config}")?;
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.table.columns)?;
                for r in &self.table.rows {
                    w.write_record(r.iter().map(Cell::plain))?;
                }
                w.flush()
            }
            Format::Text => {
                writeln!(out, "# config {config}")?;
                let cells: Vec<Vec<String>> = self
                    .table
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::pretty).collect())
                    .collect();
                let widths: Vec<usize> = self
                    .table
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(out, "{}", line(self.table.columns.iter().map(String::as_str).collect()))?;
                for r in &cells {
                    writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_per_format() {
        assert_eq!(Cell::Num(0.25).plain(), "0.25");
        assert_eq!(Cell::Num(1.0 / 3.0).pretty(), "0.333333");
        assert_eq!(Cell::Num(2.0).pretty(), "2");
        assert_eq!(Cell::Missing("ND").plain(), "ND");
        assert_eq!(Cell::Missing("ND").json(), Value::Null);
        assert_eq!(Cell::opt_int(Some(3), "NA"), Cell::Int(3));
    }

    #[test]
    fn json_rows_keyed_by_column() {
        let mut t = Table::new(["test", "K"]);
        t.push(vec![Cell::Text("hie".into()), Cell::Int(180)]);
        assert_eq!(t.json_rows(), json!([{"test": "hie", "K": 180}]));
    }
}
