//! Small versioned CSV tables: a `# schema=` line, a header, then rows.

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        String::new()
    }
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map_or(String::new(), cell)
}

impl Table {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Self { schema: schema.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n{}\n", self.schema, self.columns.join(","));
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, schema: &str) -> Result<Self> {
        let bad = |n: usize, m: String| CliError::Config(format!("table line {n}: {m}"));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| bad(1, "empty table".into()))?;
        let found = first.trim().strip_prefix("# schema=").ok_or_else(|| bad(1, "missing schema line".into()))?;
        if found != schema {
            return Err(bad(1, format!("schema `{found}`, expected `{schema}`")));
        }
        let (_, header) = lines.next().ok_or_else(|| bad(2, "missing header".into()))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (n, line) in lines {
            let row: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
            if row.len() != columns.len() {
                return Err(bad(n + 1, format!("{} fields, header has {}", row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { schema: schema.into(), columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column; empty cells become `None`.
    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self.column(name).ok_or_else(|| CliError::Config(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| {
                let s = &r[c];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| CliError::Config(format!("`{s}` in column {name} is not a number")))
                }
            })
            .collect()
    }
}
