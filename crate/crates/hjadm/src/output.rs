//! Tables and their CSV/JSON encodings.
//!
//! Floats are printed in shortest round-trip form (`{:?}`), so the same
//! numbers always give the same bytes. JSON mirrors CSV as
//! `{"columns": [...], "rows": [[...], ...]}`; non-finite floats, which
//! JSON cannot hold, are written as the strings `"inf"`, `"-inf"`, `"NaN"`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => format!("{x:?}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(n) => Value::from(*n),
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(format!("{x:?}"))),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Cell {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem; the extension comes from the format.
    pub name: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &'static [&'static str]) -> Table {
        Table {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn encode(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::render))?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::Json => {
                let rows: Vec<Vec<Value>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::to_json).collect())
                    .collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                let mut out = serde_json::to_vec(&doc)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

/// An output file as listed in the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the output directory.
    pub name: String,
    pub format: Format,
    pub columns: Vec<String>,
    /// Data rows, header excluded.
    pub rows: usize,
}

/// Writes through a temporary file in the same directory, then renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn write_table(dir: &Path, table: &Table, format: Format) -> io::Result<FileRecord> {
    let name = format!("{}.{}", table.name, format.extension());
    write_atomic(&dir.join(&name), &table.encode(format)?)?;
    Ok(FileRecord {
        name,
        format,
        columns: table.columns.iter().map(|c| c.to_string()).collect(),
        rows: table.rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["t", "kind", "ok"]);
        t.push(vec![0.1.into(), "finite".into(), true.into()]);
        t.push(vec![f64::INFINITY.into(), "infinite".into(), false.into()]);
        t
    }

    #[test]
    fn csv_uses_round_trip_floats() {
        let text = String::from_utf8(sample().encode(Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "t,kind,ok\n0.1,finite,true\ninf,infinite,false\n");
        assert_eq!(Cell::Float(1.0 / 3.0).render().parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(Cell::Float(1e-300).render(), "1e-300");
    }

    #[test]
    fn json_mirrors_csv() {
        let v: Value = serde_json::from_slice(&sample().encode(Format::Json).unwrap()).unwrap();
        assert_eq!(v["columns"], serde_json::json!(["t", "kind", "ok"]));
        assert_eq!(v["rows"][0], serde_json::json!([0.1, "finite", true]));
        assert_eq!(v["rows"][1][0], "inf");
    }
}
