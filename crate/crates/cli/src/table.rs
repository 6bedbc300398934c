//! Tabular output as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, so every value re-parses to the same f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut dyn Write, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(csv_field).collect();
                    writeln!(out, "{}", fields.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (name, cell) in self.columns.iter().zip(row) {
                            let v = match cell {
                                Cell::Float(x) => serde_json::Number::from_f64(*x)
                                    .map(Value::Number)
                                    .unwrap_or(Value::Null),
                                Cell::Int(x) => Value::from(*x),
                                Cell::Bool(x) => Value::from(*x),
                                Cell::Text(s) => Value::from(s.clone()),
                            };
                            obj.insert(name.to_string(), v);
                        }
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &rows)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_lossless() {
        let mut t = Table::new(vec!["x", "name"]);
        t.push(vec![Cell::from(0.1 + 0.2), Cell::from("a,b")]);
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let x: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(x, 0.1 + 0.2);
        assert!(line.ends_with("\"a,b\""));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(vec!["n", "ok"]);
        t.push(vec![Cell::from(3u32), Cell::from(true)]);
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Json).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["n"], 3);
        assert_eq!(v[0]["ok"], true);
    }
}
