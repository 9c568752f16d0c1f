//! Path and table CSV files: `.` decimal separator, `\n` line endings,
//! header row `x,y1,…`.

use std::io::Write;
use std::path::Path;

use fracvar::{Grid, SampledPath};

use crate::error::{CliError, Result};
use crate::format::real;

/// Writes a header and rows of reals.
pub fn write_table<W: Write>(out: W, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let wrap = |e: csv::Error| CliError::invalid(format!("writing CSV: {e}"));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.iter().map(|v| real(*v))).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::invalid(format!("writing CSV: {e}")))
}

pub fn path_header(dim: usize) -> Vec<String> {
    std::iter::once("x".to_string())
        .chain((1..=dim).map(|i| format!("y{i}")))
        .collect()
}

pub fn write_path<W: Write>(out: W, path: &SampledPath) -> Result<()> {
    let grid = path.grid();
    let rows = (0..grid.len()).map(|k| {
        std::iter::once(grid.node(k))
            .chain((0..path.dim()).map(|i| path.at(i, k)))
            .collect()
    });
    write_table(out, &path_header(path.dim()), rows)
}

/// Reads a path written by [`write_path`] and checks that its abscissae
/// are the nodes of `grid`.
pub fn read_path(file: &Path, grid: &Grid, dim: usize) -> Result<SampledPath> {
    let fail = |message: String| CliError::Parse {
        path: file.display().to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .from_path(file)
        .map_err(|e| fail(e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| fail(e.to_string()))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header != path_header(dim) {
        return Err(fail(format!(
            "expected header {}, found {}",
            path_header(dim).join(","),
            header.join(",")
        )));
    }
    let mut components = vec![Vec::with_capacity(grid.len()); dim];
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let values = record
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| fail(format!("row {}: `{s}` is not a number", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        if k >= grid.len() {
            return Err(fail(format!("more than {} rows", grid.len())));
        }
        let x = grid.node(k);
        if (values[0] - x).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(fail(format!("row {}: x = {} but grid node is {x}", k + 1, values[0])));
        }
        for (c, v) in components.iter_mut().zip(&values[1..]) {
            c.push(*v);
        }
    }
    if components[0].len() != grid.len() {
        return Err(fail(format!(
            "{} rows for a grid of {} nodes",
            components[0].len(),
            grid.len()
        )));
    }
    Ok(SampledPath::new(*grid, components)?)
}
