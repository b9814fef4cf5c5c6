//! CSV input and output. Numbers are written with 17 significant digits so
//! that a write/read round trip is exact.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridProfile, Layout};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => io_err(path, source),
            _ => unreachable!(),
        }
    } else {
        Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV cell: a number or free text.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_number(*v),
        Cell::Text(s) => s.clone(),
    }
}

/// Writes a header and rows to any writer.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(render))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a table of numbers to any writer.
pub fn write_numeric<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> csv::Result<()> {
    write_table(out, header, rows.into_iter().map(|r| r.into_iter().map(Cell::Num).collect()))
}

pub fn write_table_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_table(file, header, rows).map_err(|e| csv_err(path, e))
}

pub fn write_numeric_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_table_file(path, header, rows.into_iter().map(|r| r.into_iter().map(Cell::Num).collect()))
}

/// Writes a profile as `x,<value_name>`.
pub fn write_profile(path: &Path, profile: &GridProfile, value_name: &str) -> Result<()> {
    let rows = profile
        .positions()
        .into_iter()
        .zip(profile.values())
        .map(|(x, &v)| vec![x, v]);
    write_numeric_file(path, &["x", value_name], rows)
}

/// Reads a numeric table. A first row that does not parse as numbers is
/// treated as a header; empty lines and lines starting with `#` are skipped.
pub fn read_numeric(path: &Path) -> Result<(Option<Vec<String>>, Vec<Vec<f64>>)> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut header = None;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => header = Some(record.iter().map(str::to_string).collect()),
            Err(e) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    message: format!("line {}: {e}", i + 1),
                })
            }
        }
    }
    Ok((header, rows))
}

/// Reads `x,value` pairs, sorted by `x`.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let (_, rows) = read_numeric(path)?;
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() < 2 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: format!("data row {} has {} columns, expected 2", i + 1, row.len()),
            });
        }
        points.push((row[0], row[1]));
    }
    if points.len() < 2 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: "need at least two points".into(),
        });
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(points)
}

/// Linear interpolation through sorted points, constant beyond the ends.
pub fn interpolate_points(points: &[(f64, f64)], x: f64) -> f64 {
    let k = points.partition_point(|p| p.0 <= x);
    if k == 0 {
        return points[0].1;
    }
    if k == points.len() {
        return points[k - 1].1;
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Resamples scattered points onto a grid of `n` cells.
pub fn resample(points: &[(f64, f64)], x_min: f64, x_max: f64, n: usize, layout: Layout) -> Result<GridProfile> {
    match layout {
        Layout::Cells => GridProfile::cells_from_fn(x_min, x_max, n, |x| interpolate_points(points, x)),
        Layout::Nodes => GridProfile::nodes_from_fn(x_min, x_max, n, |x| interpolate_points(points, x)),
    }
}

/// Reads a profile file and resamples it onto the given grid.
pub fn read_profile(path: &Path, x_min: f64, x_max: f64, n: usize, layout: Layout) -> Result<GridProfile> {
    resample(&read_points(path)?, x_min, x_max, n, layout)
}
