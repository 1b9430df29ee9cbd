//! Space-delimited tables with `#` metadata lines, and the matching reader.
//!
//! A file starts with `# key: value` metadata lines, then a `# col1 col2 ...`
//! header, then data rows. Snapshot files add `# t=<time>` markers between
//! blocks of rows.

use std::fmt;
use std::io::{self, Write};

pub use qbm_core::evolution::report::fmt as format_number;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ReadError {}

fn read_error(line: usize, message: impl Into<String>) -> ReadError {
    ReadError {
        line,
        message: message.into(),
    }
}

pub fn write_metadata<W: Write + ?Sized>(out: &mut W, metadata: &[(String, String)]) -> io::Result<()> {
    for (key, value) in metadata {
        writeln!(out, "# {key}: {value}")?;
    }
    Ok(())
}

pub fn write_header<W: Write + ?Sized>(out: &mut W, columns: &[&str]) -> io::Result<()> {
    writeln!(out, "# {}", columns.join(" "))
}

/// Writes one row; numbers use 17 significant digits.
pub fn write_row<W: Write + ?Sized>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&v| format_number(v)).collect();
    writeln!(out, "{}", cells.join(" "))
}

enum Comment<'a> {
    Meta(&'a str, &'a str),
    Time(&'a str),
    Header(&'a str),
}

fn classify(body: &str) -> Comment<'_> {
    if let Some(t) = body.strip_prefix("t=") {
        Comment::Time(t)
    } else if let Some((k, v)) = body.split_once(": ") {
        Comment::Meta(k.trim(), v.trim())
    } else {
        Comment::Header(body)
    }
}

/// A parsed table; cells are kept as text so string columns survive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, ReadError> {
        let mut table = Table::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(body) = line.strip_prefix('#') {
                match classify(body.trim()) {
                    Comment::Meta(k, v) => table.metadata.push((k.to_string(), v.to_string())),
                    Comment::Time(_) => return Err(read_error(lineno, "snapshot marker in a plain table")),
                    Comment::Header(h) => {
                        if !table.columns.is_empty() {
                            return Err(read_error(lineno, "second column header"));
                        }
                        table.columns = h.split(' ').map(str::to_string).collect();
                    }
                }
                continue;
            }
            table.rows.push(split_row(line, table.columns.len(), lineno)?);
        }
        Ok(table)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of column `name`.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>, ReadError> {
        let col = self
            .column_index(name)
            .ok_or_else(|| read_error(0, format!("no column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[col]
                    .parse()
                    .map_err(|_| read_error(i + 1, format!("`{}` in column `{name}` is not a number", row[col])))
            })
            .collect()
    }
}

fn split_row(line: &str, width: usize, lineno: usize) -> Result<Vec<String>, ReadError> {
    if width == 0 {
        return Err(read_error(lineno, "data row before the column header"));
    }
    let cells: Vec<String> = line.split(' ').map(str::to_string).collect();
    if cells.len() != width {
        return Err(read_error(
            lineno,
            format!("expected {width} fields, found {}", cells.len()),
        ));
    }
    Ok(cells)
}

fn parse_numbers(line: &str, width: usize, lineno: usize) -> Result<Vec<f64>, ReadError> {
    split_row(line, width, lineno)?
        .iter()
        .map(|c| c.parse().map_err(|_| read_error(lineno, format!("`{c}` is not a number"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub rows: Vec<Vec<f64>>,
}

/// A snapshot file: metadata, a column header and `# t=` blocks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SnapshotFile {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotFile {
    pub fn parse(text: &str) -> Result<Self, ReadError> {
        let mut file = SnapshotFile::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(body) = line.strip_prefix('#') {
                match classify(body.trim()) {
                    Comment::Meta(k, v) => file.metadata.push((k.to_string(), v.to_string())),
                    Comment::Time(t) => {
                        let time = t
                            .parse()
                            .map_err(|_| read_error(lineno, format!("bad snapshot time `{t}`")))?;
                        file.snapshots.push(Snapshot { time, rows: Vec::new() });
                    }
                    Comment::Header(h) => {
                        if !file.columns.is_empty() {
                            return Err(read_error(lineno, "second column header"));
                        }
                        file.columns = h.split(' ').map(str::to_string).collect();
                    }
                }
                continue;
            }
            let row = parse_numbers(line, file.columns.len(), lineno)?;
            match file.snapshots.last_mut() {
                Some(s) => s.rows.push(row),
                None => return Err(read_error(lineno, "data row before the first `# t=` marker")),
            }
        }
        Ok(file)
    }
}
