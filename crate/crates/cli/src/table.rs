//! Row tables rendered as CSV or as a JSON array of row objects.

use dwell::sweep::{format_number, round_significant, Format};
use serde_json::Value;

pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(round_significant(v))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, c)| {
                        let v = match c {
                            Cell::Num(v) => json_number(*v),
                            Cell::Int(n) => Value::from(*n),
                            Cell::Text(t) => Value::from(t.as_str()),
                            Cell::Empty => Value::Null,
                        };
                        (name.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        pretty(&Value::Array(self.json_rows()))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
