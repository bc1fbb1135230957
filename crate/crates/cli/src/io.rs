//! Output files: commented CSV tables and binary field snapshots.
//!
//! Snapshot layout (little endian): magic `MKDVSNAP`, `u32` version, `f64`
//! box length, `u64` point count, then `(re, im)` pairs of `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mkdv_core::spectral::{Field, GridSpec};
use mkdv_core::{Complex64, Error, Result};

const MAGIC: &[u8; 8] = b"MKDVSNAP";
const VERSION: u32 = 1;

pub fn write_snapshot(path: &Path, field: &Field) -> Result<()> {
    let grid = field.grid();
    let mut bytes = Vec::with_capacity(28 + 16 * grid.points());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&grid.length().to_le_bytes());
    bytes.extend_from_slice(&(grid.points() as u64).to_le_bytes());
    for c in field.samples() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    let bad = |what: &str| Error::Format(format!("{}: {what}", path.display()));
    if bytes.len() < 28 || &bytes[..8] != MAGIC {
        return Err(bad("not a field snapshot"));
    }
    let word = |at: usize| -> [u8; 8] { bytes[at..at + 8].try_into().expect("8 bytes") };
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let length = f64::from_le_bytes(word(12));
    let points = u64::from_le_bytes(word(20)) as usize;
    if bytes.len() != 28 + 16 * points {
        return Err(bad("truncated sample block"));
    }
    let grid = GridSpec::new(length, points)?;
    let samples = (0..points)
        .map(|j| {
            let at = 28 + 16 * j;
            Complex64::new(f64::from_le_bytes(word(at)), f64::from_le_bytes(word(at + 8)))
        })
        .collect();
    Field::new(grid, samples)
}

/// CSV table with `#` header comments, written in one piece.
#[derive(Clone, Debug)]
pub struct Table {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Fixed float format so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Table {
    pub fn new(schema: &str, config_hash: &str, columns: &[&str]) -> Self {
        Table {
            comments: vec![format!("schema={schema}"), format!("config_hash={config_hash}")],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn grid_comment(&mut self, grid: &GridSpec) {
        self.comment(format!("grid L={} M={}", num(grid.length()), grid.points()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
