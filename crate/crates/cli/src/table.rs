//! Ordered tables with deterministic CSV and JSON renderings.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 12 significant digits in scientific notation; `NaN` for failed entries.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
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
                    Cell::Num(v) => fmt_num(*v),
                    // Free text never carries the separator.
                    Cell::Text(s) => s.replace([',', '\n'], ";"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of row objects keyed by column; non-finite numbers become `null`.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.columns.iter().zip(row) {
                    let v = match c {
                        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                        Cell::Text(s) => Value::String(s.clone()),
                    };
                    m.insert(k.clone(), v);
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_fixed_significant_digits() {
        let mut t = Table::new(["a", "status"]);
        t.push(vec![0.5.into(), "ok".into()]);
        t.push(vec![f64::NAN.into(), "failed, badly".into()]);
        assert_eq!(t.to_csv(), "a,status\n5.00000000000e-1,ok\nNaN,failed; badly\n");
    }

    #[test]
    fn csv_round_trips_twelve_digits() {
        let v = std::f64::consts::PI;
        let back: f64 = fmt_num(v).parse().unwrap();
        assert!((back - v).abs() / v < 1e-11);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(["x", "y"]);
        t.push(vec![1.0.into(), f64::NAN.into()]);
        assert_eq!(t.to_json(), serde_json::json!([{"x": 1.0, "y": null}]));
    }
}
