//! Result tables and their CSV form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Flag(bool),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// `None` becomes NaN.
    pub fn maybe(x: Option<f64>) -> Self {
        Cell::Num(x.unwrap_or(f64::NAN))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self, out: &mut String) {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                let _ = write!(out, "\"{}\"", s.replace('"', "\"\""));
            }
            Cell::Text(s) => out.push_str(s),
            Cell::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Cell::Num(x) => out.push_str(&format_number(*x)),
            Cell::Flag(b) => out.push_str(if *b { "true" } else { "false" }),
        }
    }
}

/// 17 significant digits in scientific notation; `nan`, `inf` and `-inf`
/// for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// A named table with a fixed column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub schema: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, schema: &[&str]) -> Self {
        ResultTable {
            name: name.into(),
            schema: schema.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    ///
    /// When the row length differs from the schema.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.schema.len(), "row does not match the schema of {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c == name)
    }

    /// Rows whose `key` column holds the text `value`.
    pub fn rows_where<'a>(&'a self, key: &str, value: &'a str) -> impl Iterator<Item = &'a [Cell]> + 'a {
        let col = self.column(key);
        self.rows
            .iter()
            .filter(move |r| col.is_some_and(|c| r[c].as_str() == Some(value)))
            .map(Vec::as_slice)
    }

    /// Numeric value of `column` in the first row whose `key` column is
    /// `value`.
    pub fn lookup(&self, key: &str, value: &str, column: &str) -> Option<f64> {
        let c = self.column(column)?;
        self.rows_where(key, value).next().and_then(|r| r[c].as_f64())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.schema.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// Writes the CSV form to `path`.
    pub fn emit(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_csv())
    }
}

/// A per-cell failure recorded in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub method: String,
    pub tau: f64,
    pub singular: bool,
    pub message: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new("t", &["a", "b"]);
        assert_eq!(t.to_csv(), "a,b\n");
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        // 17 significant digits round-trip every f64.
        for x in [1.0 / 3.0, 6.02214076e23, 5e-324, f64::MAX] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rows_render_with_lf() {
        let mut t = ResultTable::new("t", &["name", "n", "x", "ok"]);
        t.push(vec![Cell::text("a,b"), Cell::Int(3), Cell::Num(f64::NAN), Cell::Flag(true)]);
        assert_eq!(t.to_csv(), "name,n,x,ok\n\"a,b\",3,nan,true\n");
        assert!(!t.to_csv().contains('\r'));
        assert_eq!(t.lookup("name", "a,b", "n"), Some(3.0));
        assert_eq!(t.lookup("name", "zzz", "n"), None);
    }

    #[test]
    #[should_panic]
    fn schema_mismatch_panics() {
        ResultTable::new("t", &["a"]).push(vec![]);
    }
}
