//! CSV output with a `#` metadata block.
//!
//! Floats are written in Rust's shortest round-trip form, so re-parsing a
//! file yields bit-identical values. Rows are streamed through a buffered
//! writer; nothing is held in memory beyond the current row.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_cell(out: &mut String, cell: &Cell) {
    match cell {
        Cell::Num(v) => out.push_str(&format_float(*v)),
        Cell::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Cell::Text(s) if s.contains([',', '"', '\n']) => {
            out.push('"');
            out.push_str(&s.replace('"', "\"\""));
            out.push('"');
        }
        Cell::Text(s) => out.push_str(s),
    }
}

/// Streaming CSV writer.
pub struct TableWriter<W: Write> {
    out: W,
    columns: usize,
    rows: usize,
    line: String,
}

impl TableWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, metadata: &[(String, String)], columns: &[&str]) -> Result<Self> {
        let file = File::create(path.as_ref())
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.as_ref().display())))?;
        Self::new(BufWriter::new(file), metadata, columns)
    }
}

impl<W: Write> TableWriter<W> {
    pub fn new(mut out: W, metadata: &[(String, String)], columns: &[&str]) -> Result<Self> {
        for (k, v) in metadata {
            writeln!(out, "# {k} = {}", v.replace('\n', " "))?;
        }
        let mut line = String::new();
        for (i, c) in columns.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            write_cell(&mut line, &Cell::Text((*c).to_string()));
        }
        writeln!(out, "{line}")?;
        Ok(Self { out, columns: columns.len(), rows: 0, line })
    }

    pub fn write_row(&mut self, row: &[Cell]) -> Result<()> {
        if row.len() != self.columns {
            return Err(Error::InvalidParameter(format!(
                "row {} has {} cells, table has {} columns",
                self.rows,
                row.len(),
                self.columns
            )));
        }
        self.line.clear();
        for (i, c) in row.iter().enumerate() {
            if i > 0 {
                self.line.push(',');
            }
            write_cell(&mut self.line, c);
        }
        self.line.push('\n');
        self.out.write_all(self.line.as_bytes())?;
        self.rows += 1;
        Ok(())
    }

    pub fn write_floats(&mut self, row: &[f64]) -> Result<()> {
        let cells: Vec<Cell> = row.iter().map(|&v| Cell::Num(v)).collect();
        self.write_row(&cells)
    }

    /// Flushes and returns the number of data rows written.
    pub fn finish(mut self) -> Result<usize> {
        self.out.flush()?;
        Ok(self.rows)
    }
}

/// Writes a whole table to `path`; returns the number of data rows.
pub fn emit_table<I>(path: impl AsRef<Path>, metadata: &[(String, String)], columns: &[&str], rows: I) -> Result<usize>
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    let mut w = TableWriter::create(path, metadata, columns)?;
    for row in rows {
        w.write_row(&row)?;
    }
    w.finish()
}

/// A table read back from disk; cells are kept as text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column(name).ok_or_else(|| Error::InvalidParameter(format!("no column '{name}'")))?;
        self.rows
            .iter()
            .map(|r| r[i].parse::<f64>().map_err(|_| Error::InvalidParameter(format!("'{}' is not a number", r[i]))))
            .collect()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<ParsedTable> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut table = ParsedTable::default();
    let mut header_seen = false;
    for line in reader.lines() {
        let line = line?;
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                table.metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cells = split_csv_line(&line);
        if header_seen {
            table.rows.push(cells);
        } else {
            table.columns = cells;
            header_seen = true;
        }
    }
    Ok(table)
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut cells = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => cells.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    cells.push(cur);
    cells
}
