//! On-disk formats: "QTF1"/"QSF1" field snapshots, diagnostics CSV and small
//! CSV/JSON helpers shared by the CLI.
//!
//! Snapshot layout: 4 magic bytes, little-endian `u32` points-per-axis `n`,
//! little-endian `f64` box length and time tag, then the component planes
//! (5 for tensors, 1 for scalars), each `n^3` little-endian `f64` x-fastest.

use crate::dynamics::DiagnosticsRow;
use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField, TensorField};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

const TENSOR_MAGIC: &[u8; 4] = b"QTF1";
const SCALAR_MAGIC: &[u8; 4] = b"QSF1";

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), reason: reason.into() }
}

fn write_header(w: &mut impl Write, magic: &[u8; 4], grid: GridSpec, time_tag: f64) -> Result<()> {
    w.write_all(magic)?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.box_len().to_le_bytes())?;
    w.write_all(&time_tag.to_le_bytes())?;
    Ok(())
}

fn write_plane(w: &mut impl Write, plane: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(plane.len() * 8);
    for v in plane {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_header(r: &mut impl Read, path: &Path, magic: &[u8; 4]) -> Result<(GridSpec, f64)> {
    let mut got = [0u8; 4];
    r.read_exact(&mut got).map_err(|_| format_err(path, "file too short for header"))?;
    if &got != magic {
        return Err(format_err(
            path,
            format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4).map_err(|_| format_err(path, "truncated header"))?;
    let n = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8).map_err(|_| format_err(path, "truncated header"))?;
    let box_len = f64::from_le_bytes(b8);
    r.read_exact(&mut b8).map_err(|_| format_err(path, "truncated header"))?;
    let time_tag = f64::from_le_bytes(b8);
    let grid = GridSpec::new(n, box_len)
        .map_err(|e| format_err(path, format!("invalid grid in header: {e}")))?;
    Ok((grid, time_tag))
}

fn read_plane(r: &mut impl Read, path: &Path, len: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; len * 8];
    r.read_exact(&mut buf).map_err(|_| format_err(path, "truncated plane data"))?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn expect_eof(r: &mut impl Read, path: &Path) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(format_err(path, "trailing bytes after field data")),
    }
}

pub fn write_qtf1(path: &Path, f: &TensorField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, TENSOR_MAGIC, f.grid, f.time_tag)?;
    for plane in &f.comps {
        write_plane(&mut w, plane)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_qtf1(path: &Path) -> Result<TensorField> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    let mut r = BufReader::new(File::open(path)?);
    let (grid, time_tag) = read_header(&mut r, path, TENSOR_MAGIC)?;
    let mut comps = Vec::with_capacity(5);
    for _ in 0..5 {
        comps.push(read_plane(&mut r, path, grid.site_count())?);
    }
    expect_eof(&mut r, path)?;
    let mut it = comps.into_iter();
    Ok(TensorField { grid, comps: std::array::from_fn(|_| it.next().unwrap()), time_tag })
}

pub fn write_qsf1(path: &Path, f: &ScalarField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, SCALAR_MAGIC, f.grid, f.time_tag)?;
    write_plane(&mut w, &f.values)?;
    w.flush()?;
    Ok(())
}

pub fn read_qsf1(path: &Path) -> Result<ScalarField> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    let mut r = BufReader::new(File::open(path)?);
    let (grid, time_tag) = read_header(&mut r, path, SCALAR_MAGIC)?;
    let values = read_plane(&mut r, path, grid.site_count())?;
    expect_eof(&mut r, path)?;
    Ok(ScalarField { grid, values, time_tag })
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,energy,l2norm,linfnorm")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.t, r.energy, r.l2norm, r.linfnorm)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    let r = BufReader::new(File::open(path)?);
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "t,energy,l2norm,linfnorm" => {}
        _ => return Err(format_err(path, "missing or wrong diagnostics header")),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, format!("line {}: {e}", lineno + 2)))?;
        if vals.len() != 4 {
            return Err(format_err(path, format!("line {}: expected 4 columns", lineno + 2)));
        }
        rows.push(DiagnosticsRow { t: vals[0], energy: vals[1], l2norm: vals[2], linfnorm: vals[3] });
    }
    Ok(rows)
}

/// Two-column CSV used for correlation profiles (`r,c`) and similar series.
pub fn write_xy_csv(path: &Path, header: (&str, &str), rows: &[(f64, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{},{}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(w, "{x},{y}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
