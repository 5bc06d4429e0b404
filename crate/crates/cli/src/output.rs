//! Flat tables rendered as CSV (with one leading comment line) or as a JSON
//! array of objects. Floats use 17 significant digits; NaN and missing
//! values become empty cells or `null`.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    /// Text, including exact rationals in `p/q` form.
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
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

pub fn format_float(v: f64) -> Option<String> {
    if v.is_finite() {
        Some(format!("{v:.16e}"))
    } else if v.is_nan() {
        None
    } else if v > 0.0 {
        Some("inf".into())
    } else {
        Some("-inf".into())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, comment: &str) -> String {
        match format {
            Format::Csv => self.to_csv(comment),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self, comment: &str) -> String {
        let mut out = format!("# {comment}\n");
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell))
                .expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("cells are UTF-8"));
        out
    }

    fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", json_string(col), json_cell(cell));
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v).unwrap_or_default(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        // JSON has no infinities either, so only finite values are numbers.
        Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
        Cell::Float(_) | Cell::Missing => "null".into(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => json_string(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["k", "x", "ok", "q"]);
        t.push(vec![
            2u32.into(),
            0.1.into(),
            true.into(),
            Cell::Text("3/2".into()),
        ]);
        t.push(vec![
            3u32.into(),
            f64::NAN.into(),
            false.into(),
            Cell::Missing,
        ]);
        t
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv, "khessian 0.1.0 test");
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# khessian 0.1.0 test");
        assert_eq!(lines[1], "k,x,ok,q");
        assert_eq!(lines[2], "2,1.0000000000000001e-1,true,3/2");
        assert_eq!(lines[3], "3,,false,");
    }

    #[test]
    fn json_layout() {
        let s = sample().render(Format::Json, "ignored");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v[0]["x"].as_f64().unwrap(), 0.1);
        assert!(v[1]["x"].is_null());
        assert_eq!(v[0]["q"], "3/2");
        assert_eq!(Table::new(vec!["a"]).render(Format::Json, ""), "[]\n");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.736_793_634_655, 1e-300, 6.02e23, f64::MAX] {
            let s = format_float(v).unwrap();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }
}
