//! Flat-file formats: comma-separated tables with a one-line header and
//! 17-significant-digit floats, and key=value metadata sidecars.
//!
//! Lines starting with `#` before the header carry free-form annotations
//! (e.g. fitted exponents) and are returned by [`read_table`].

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::residual::ResidualReport;
use crate::trajectory::Trajectory;

/// Renders `v` with 17 significant digits, enough to parse back bitwise.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A parsed table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str], columns: Vec<Vec<f64>>) -> Result<Self> {
        if header.len() != columns.len() {
            return Err(Error::InvalidConfig(format!(
                "{} column names for {} columns",
                header.len(),
                columns.len()
            )));
        }
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::InvalidConfig("columns differ in length".into()));
            }
        }
        Ok(Self {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            columns,
        })
    }

    pub fn with_comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header.iter().position(|h| h == name).map(|i| self.columns[i].as_slice())
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_table<W: Write>(mut out: W, table: &Table) -> Result<()> {
    for c in &table.comments {
        writeln!(out, "# {c}").map_err(io_err)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header).map_err(io_err)?;
    for i in 0..table.rows() {
        w.write_record(table.columns.iter().map(|c| format_float(c[i]))).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_table<R: Read>(input: R) -> Result<Table> {
    let mut buf = std::io::BufReader::new(input);
    let mut comments = Vec::new();
    let mut rest = String::new();
    loop {
        let mut line = String::new();
        if buf.read_line(&mut line).map_err(io_err)? == 0 {
            break;
        }
        match line.strip_prefix('#') {
            Some(c) => comments.push(c.trim().to_string()),
            None => {
                rest = line;
                break;
            }
        }
    }
    let mut r = csv::Reader::from_reader(rest.as_bytes().chain(buf));
    let header: Vec<String> = r.headers().map_err(io_err)?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for rec in r.records() {
        let rec = rec.map_err(io_err)?;
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            let v = field
                .trim()
                .parse::<f64>()
                .map_err(|e| io_err(format!("bad number {field:?}: {e}")))?;
            col.push(v);
        }
    }
    Ok(Table {
        comments,
        header,
        columns,
    })
}

/// Two-column table `t,<name>`.
pub fn trajectory_table(traj: &Trajectory, name: &str) -> Table {
    Table {
        comments: Vec::new(),
        header: vec!["t".into(), name.into()],
        columns: vec![traj.times().to_vec(), traj.values().to_vec()],
    }
}

fn optional_column(traj: &Option<Trajectory>, n: usize) -> Vec<f64> {
    match traj {
        Some(t) => t.values().to_vec(),
        None => vec![f64::NAN; n],
    }
}

fn optional_number(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), format_float)
}

/// `t,delta,short_asymptote,long_asymptote` preceded by a comment line
/// with the fitted exponents. Missing curves or fits are NaN.
pub fn residual_table(report: &ResidualReport) -> Table {
    let n = report.residual.len();
    Table {
        comments: vec![format!(
            "fitted_short_exponent={},fitted_long_exponent={}",
            optional_number(report.fitted_short_exponent()),
            optional_number(report.fitted_long_exponent())
        )],
        header: ["t", "delta", "short_asymptote", "long_asymptote"].map(String::from).to_vec(),
        columns: vec![
            report.residual.times().to_vec(),
            report.residual.values().to_vec(),
            optional_column(&report.short_asymptote, n),
            optional_column(&report.long_asymptote, n),
        ],
    }
}

/// Ordered key=value pairs.
pub type Metadata = BTreeMap<String, String>;

pub fn write_metadata<W: Write>(mut out: W, meta: &Metadata) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "{k}={v}").map_err(io_err)?;
    }
    Ok(())
}

pub fn read_metadata<R: Read>(input: R) -> Result<Metadata> {
    let mut meta = Metadata::new();
    for line in std::io::BufReader::new(input).lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| io_err(format!("no '=' in {line:?}")))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(meta)
}
