//! Flat tables written as CSV or JSON, and read back.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// One cell of a table.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Field {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Field::Num(v) => Some(*v),
            Field::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Field::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Field::Int(v) => Value::from(*v),
            Field::Bool(b) => Value::Bool(*b),
            Field::Text(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: &Value) -> Result<Field> {
        Ok(match v {
            Value::Null => Field::Num(f64::NAN),
            Value::Bool(b) => Field::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Field::Int(i),
                _ => Field::Num(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Field::Text(s.clone()),
            other => return Err(Error::Domain(format!("nested value {other} in a flat record"))),
        })
    }
}

/// Floats carry 17 significant digits so they parse back bit-for-bit.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Num(v) => f.write_str(&fmt_num(*v)),
            Field::Int(v) => write!(f, "{v}"),
            Field::Bool(b) => write!(f, "{b}"),
            Field::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}
impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}
impl From<i64> for Field {
    fn from(v: i64) -> Self {
        Field::Int(v)
    }
}
impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}
impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}
impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

/// Header plus rows of equal length.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// RFC 4180 CSV with a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|f| f.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON array of flat objects keyed by the header.
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> =
                    self.header.iter().cloned().zip(row.iter().map(Field::to_json)).collect();
                Value::Object(map)
            })
            .collect();
        serde_json::to_writer_pretty(&mut w, &records)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_path(&self, path: &Path, format: Format) -> Result<()> {
        let f = BufWriter::new(File::create(path)?);
        self.write(f, format)
    }

    /// Inverse of [`Table::write_json`]; key order comes from the first record.
    pub fn read_json<R: Read>(r: R) -> Result<Table> {
        let records: Vec<Map<String, Value>> = serde_json::from_reader(r)?;
        let mut table = Table::default();
        if let Some(first) = records.first() {
            table.header = first.keys().cloned().collect();
        }
        for rec in &records {
            let row = table
                .header
                .iter()
                .map(|k| rec.get(k).map_or(Ok(Field::Num(f64::NAN)), Field::from_json))
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    /// Reads CSV; cells that parse as integers, floats or booleans are typed.
    pub fn read_csv<R: Read>(r: R) -> Result<Table> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.iter().map(String::from).collect();
        let mut table = Table { header, rows: Vec::new() };
        for rec in rd.records() {
            let rec = rec?;
            table.rows.push(rec.iter().map(parse_cell).collect());
        }
        Ok(table)
    }
}

fn parse_cell(s: &str) -> Field {
    if let Ok(i) = s.parse::<i64>() {
        return Field::Int(i);
    }
    if let Ok(v) = s.parse::<f64>() {
        return Field::Num(v);
    }
    match s {
        "true" => Field::Bool(true),
        "false" => Field::Bool(false),
        _ => Field::Text(s.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["eta", "series", "n", "ok"]);
        t.push(vec![0.1.into(), "a, \"quoted\"".into(), 3usize.into(), true.into()]);
        t.push(vec![(-1.0f64 / 3.0).into(), "b".into(), 0usize.into(), false.into()]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        Table::new(["eta", "value"]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "eta,value\n");
    }

    #[test]
    fn csv_quotes_and_round_trips() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"a, \"\"quoted\"\"\""));
        assert!(text.contains("-3.3333333333333331e-1"));
        assert_eq!(Table::read_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn json_round_trips() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        assert_eq!(Table::read_json(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        for v in [std::f64::consts::PI, -1e-300, 123456789.12345679] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
