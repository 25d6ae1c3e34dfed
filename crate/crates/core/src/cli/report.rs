//! Report rendering: aligned tables (10 significant digits), CSV and
//! canonical JSON (17 significant digits).

use serde_json::Value;

use crate::error::Result;
use crate::json::{format_sig, to_canonical_string};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn render(&self, digits: usize) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => format_sig(*x, digits),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<u64> for Cell {
    fn from(k: u64) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            title: None,
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn titled(mut self, title: &str) -> Self {
        self.title = Some(title.to_string());
        self
    }

    /// Two-column `field | value` table.
    pub fn fields(rows: Vec<(&str, Cell)>) -> Self {
        let mut t = Self::new(&["field", "value"]);
        for (k, v) in rows {
            t.push(vec![k.into(), v]);
        }
        t
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn render_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.render(10)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|k| {
                cells
                    .iter()
                    .map(|r| r[k].chars().count())
                    .chain([self.headers[k].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |row: &[String]| -> String {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        if let Some(title) = &self.title {
            out.push_str(title);
            out.push('\n');
        }
        out.push_str(&line(&self.headers));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    fn render_csv(&self) -> String {
        let quote = |s: String| -> String {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s
            }
        };
        let mut out = String::new();
        out.push_str(&self.headers.iter().cloned().map(quote).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Bool(b) => b.to_string(),
                    other => other.render(17),
                })
                .map(quote)
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// A command's result: the machine-readable value and its tabular views.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => to_canonical_string(&self.json)?,
            OutputFormat::Table => self
                .tables
                .iter()
                .map(Table::render_text)
                .collect::<Vec<_>>()
                .join("\n"),
            OutputFormat::Csv => self
                .tables
                .iter()
                .map(Table::render_csv)
                .collect::<Vec<_>>()
                .join("\n"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["name", "value", "ok"]);
        t.push(vec!["pi".into(), std::f64::consts::PI.into(), true.into()]);
        t.push(vec!["a,b".into(), 1e-12.into(), false.into()]);
        t
    }

    #[test]
    fn text_table_uses_ten_digits() {
        let text = sample().render_text();
        assert!(text.contains("3.141592654"), "{text}");
        assert!(text.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn csv_uses_seventeen_digits_and_quotes() {
        let csv = sample().render_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "name,value,ok");
        assert_eq!(lines[1], "pi,3.1415926535897931,true");
        assert!(lines[2].starts_with("\"a,b\","));
    }
}
