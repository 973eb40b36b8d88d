//! CSV and JSON artifacts. Every CSV starts with `# key: value` metadata lines.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simulator::{EdgeHistogram, Percent, SweepResult, UniquenessRow};

/// Ordered `key: value` pairs written ahead of the CSV header.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn new(command: &str) -> Self {
        Self(vec![
            ("artifact".into(), "tpop".into()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("command".into(), command.into()),
        ])
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.0.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        for (k, v) in &self.0 {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }

    /// Reads the leading comment block of a CSV document.
    pub fn parse(text: &str) -> Self {
        let pairs = text
            .lines()
            .map_while(|line| line.strip_prefix('#'))
            .filter_map(|line| line.split_once(':'))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self(pairs)
    }
}

/// Creates `path` and any missing parent directories.
pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn csv_writer<W: Write>(mut w: W, meta: &Metadata, header: &[&str]) -> Result<csv::Writer<W>> {
    meta.write_to(&mut w)?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

fn pct(p: Option<Percent>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}

pub const SWEEP_HEADER: [&str; 11] =
    ["p_h", "p_c", "tp", "tn", "fp", "fn", "tp_pct", "tn_pct", "fp_pct", "fn_pct", "runs"];

/// Percentages are left empty on cells without provers of that class.
pub fn write_sweep_csv<W: Write>(w: W, result: &SweepResult, meta: &Metadata) -> Result<()> {
    let mut out = csv_writer(w, meta, &SWEEP_HEADER)?;
    for cell in &result.cells {
        let c = &cell.counts;
        out.write_record([
            cell.p_h.to_string(),
            cell.p_c.to_string(),
            c.tp.to_string(),
            c.tn.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            pct(c.tp_pct()),
            pct(c.tn_pct()),
            pct(c.fp_pct()),
            pct(c.fn_pct()),
            c.total().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_surface_csv<W, I>(w: W, rows: I, meta: &Metadata) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (f64, f64, f64)>,
{
    let mut out = csv_writer(w, meta, &["p_h", "p_c", "value"])?;
    for (p_h, p_c, value) in rows {
        out.write_record([p_h.to_string(), p_c.to_string(), value.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(w: W, histogram: &EdgeHistogram, meta: &Metadata) -> Result<()> {
    let mut out = csv_writer(w, meta, &["edges", "count"])?;
    for (edges, count) in histogram.counts.iter().enumerate() {
        out.write_record([edges.to_string(), count.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_uniqueness_csv<W: Write>(w: W, rows: &[UniquenessRow], meta: &Metadata) -> Result<()> {
    let mut out = csv_writer(w, meta, &["n_agents", "fraction_unique", "theory"])?;
    for row in rows {
        out.write_record([
            row.n_agents.to_string(),
            row.fraction_unique.to_string(),
            row.theory.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Pretty JSON document with a `metadata` object next to `data`.
pub fn write_json<W: Write, T: Serialize>(mut w: W, data: &T, meta: &Metadata) -> Result<()> {
    let metadata: serde_json::Map<String, serde_json::Value> =
        meta.0.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
    let doc = serde_json::json!({ "metadata": metadata, "data": data });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(())
}

/// One cell of a `(p_h, p_c)` grid read back from CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridValue {
    pub p_h: f64,
    pub p_c: f64,
    /// Empty fields read as `None`.
    pub value: Option<f64>,
}

/// Reads `p_h`, `p_c` and `column` from a grid CSV, skipping metadata lines.
pub fn read_grid_column<R: Read>(r: R, column: &str) -> Result<Vec<GridValue>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidParameter(format!("missing column `{name}`")))
    };
    let (ph, pc, col) = (find("p_h")?, find("p_c")?, find(column)?);
    let number = |field: &str, name: &str| -> Result<f64> {
        field.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad {name} value `{field}`")))
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = record.get(col).unwrap_or("");
        out.push(GridValue {
            p_h: number(&record[ph], "p_h")?,
            p_c: number(&record[pc], "p_c")?,
            value: if field.trim().is_empty() { None } else { Some(number(field, column)?) },
        });
    }
    Ok(out)
}
