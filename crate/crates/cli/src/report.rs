//! Report tables and their CSV / JSON serializations.
//!
//! The header (versions, resolved config, timestamp) is kept apart from the
//! body so that two runs of one config have identical bodies.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::args::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i128),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Reals carry 17 significant digits, enough to round-trip.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) if v.is_nan() => "NaN".into(),
            Cell::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => Value::Number(self.render().parse::<Number>().expect("formatted real")),
            Cell::Int(n) => Value::Number(n.to_string().parse::<Number>().expect("integer")),
            Cell::Bool(b) => Value::Bool(*b),
            _ => Value::String(self.render()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

/// What goes above the body.
#[derive(Debug, Clone)]
pub struct Header {
    pub version: String,
    pub generated: String,
    pub config: Value,
}

impl Header {
    pub fn new(config: Value) -> Self {
        Self {
            version: format!("friable-cli {} (friable-core {})", env!("CARGO_PKG_VERSION"), friable_core::VERSION),
            generated: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
        }
    }

    /// `#` lines, each newline terminated.
    pub fn comment_lines(&self) -> String {
        format!("# {}\n# generated: {}\n# config: {}\n", self.version, self.generated, self.config)
    }
}

pub fn write_csv(out: &mut dyn Write, header: &Header, table: &Table) -> Result<(), CliError> {
    out.write_all(header.comment_lines().as_bytes())?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.columns).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn to_json(header: &Header, table: &Table) -> Value {
    let rows = table
        .rows
        .iter()
        .map(|row| Value::Object(table.columns.iter().map(|c| c.to_string()).zip(row.iter().map(Cell::json)).collect::<Map<_, _>>()))
        .collect();
    let mut head = Map::new();
    head.insert("version".into(), Value::String(header.version.clone()));
    head.insert("generated".into(), Value::String(header.generated.clone()));
    let mut doc = Map::new();
    doc.insert("header".into(), Value::Object(head));
    doc.insert("config".into(), header.config.clone());
    doc.insert("rows".into(), Value::Array(rows));
    Value::Object(doc)
}

pub fn write_report(out: &mut dyn Write, format: Format, header: &Header, table: &Table) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, header, table),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &to_json(header, table)).map_err(|e| CliError::Io(e.into()))?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Header, Table) {
        let mut t = Table::new(&["u", "rho", "n", "ok"]);
        t.push(vec![2.0.into(), (1.0 / 3.0).into(), 7u64.into(), true.into()]);
        t.push(vec![f64::INFINITY.into(), f64::NAN.into(), (-3i64).into(), false.into()]);
        let h = Header { version: "v".into(), generated: "now".into(), config: serde_json::json!({"u": [2.0]}) };
        (h, t)
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -4.2731689358807860e4, f64::MIN_POSITIVE, 1e300] {
            let s = Cell::Float(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let (h, t) = sample();
        let mut buf = Vec::new();
        write_csv(&mut buf, &h, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# v");
        assert_eq!(lines[3], "u,rho,n,ok");
        assert_eq!(lines[4], "2.0000000000000000e0,3.3333333333333331e-1,7,true");
        assert_eq!(lines[5], "inf,NaN,-3,false");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_layout() {
        let (h, t) = sample();
        let v = to_json(&h, &t);
        assert_eq!(v["rows"][0]["rho"].to_string(), "3.3333333333333331e-1");
        assert_eq!(v["rows"][0]["rho"].as_f64(), Some(1.0 / 3.0));
        assert_eq!(v["rows"][1]["u"], Value::String("inf".into()));
        assert_eq!(v["config"]["u"][0], serde_json::json!(2.0));
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["u", "rho", "n", "ok"]);
    }
}
