//! Result tables and their CSV form: `#`-prefixed metadata lines, a header
//! row, then one line per row.

use std::io::Write;
use std::path::Path;

use avwiretap::region::{RatePoint, RateRegion};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // Shortest representation that parses back to the same value.
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}").expect("write to memory");
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }

    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.to_csv();
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
        }
    }
}

/// Reads a region CSV back: rows with `hull = false` are the raw points,
/// rows with `hull = true` the stored hull.
pub fn read_region_csv(text: &str) -> Result<(RateRegion, Vec<RatePoint>), CliError> {
    let bad = |m: String| CliError::Config(format!("region csv: {m}"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column {name}")))
    };
    let (c1, c2, ch) = (col("r1")?, col("r2")?, col("hull")?);
    let (mut raw, mut hull) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(format!("{e}: {}", &rec[i])));
        let p = RatePoint::new(num(c1)?, num(c2)?);
        match &rec[ch] {
            "true" => hull.push(p),
            "false" => raw.push(p),
            other => return Err(bad(format!("hull flag must be true|false, got {other}"))),
        }
    }
    let region = RateRegion::from_points(raw).map_err(|e| bad(e.to_string()))?;
    Ok((region, hull))
}
