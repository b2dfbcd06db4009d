//! Tabular datasets written as CSV or JSON.

use super::config::Format;
use crate::{Error, Result};
use std::path::Path;

/// One value of a sweep dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub field_kv_cm: f64,
    pub b_gauss: f64,
    pub e_coll_uk: f64,
    pub m_tot_list: String,
    pub quantity: String,
    pub l_in: Option<u32>,
    pub value: f64,
    pub units: &'static str,
}

/// Column-oriented table with fixed headers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.11e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn from_rows(rows: &[Row]) -> Self {
        let mut t = Table::new(&[
            "field_kVcm",
            "B_G",
            "Ecoll_uK",
            "Mtot_list",
            "quantity",
            "Lin",
            "value",
            "units",
        ]);
        for r in rows {
            t.push(vec![
                r.field_kv_cm.into(),
                r.b_gauss.into(),
                r.e_coll_uk.into(),
                r.m_tot_list.clone().into(),
                r.quantity.clone().into(),
                r.l_in.map(i64::from).into(),
                r.value.into(),
                r.units.into(),
            ]);
        }
        t
    }

    pub fn to_csv(&self, timestamp: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text)).map_err(io)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .expect("utf-8 csv");
        Ok(if timestamp {
            format!("# generated {}\n{body}", unix_time())
        } else {
            body
        })
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::json))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("json") + "\n"
    }

    /// Writes `<dir>/<stem>.csv|json` and returns the path.
    pub fn write(
        &self,
        dir: &Path,
        stem: &str,
        format: Format,
        timestamp: bool,
    ) -> Result<std::path::PathBuf> {
        let (ext, text) = match format {
            Format::Csv => ("csv", self.to_csv(timestamp)?),
            Format::Json => ("json", self.to_json()),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.into())
}

fn at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Writes through a sibling temp file and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(at(dir))?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(at(&tmp))?;
    std::fs::rename(&tmp, path).map_err(at(path))
}
