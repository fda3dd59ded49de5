//! Field export/import: long-format CSV and the `FMFG-FLD1` binary layout.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::grid::{Field, SpaceGrid, TimeGrid};

pub const FIELD_MAGIC: &[u8; 9] = b"FMFG-FLD1";

/// CSV with header `t,x,<name>`, one row per (node, cell).
pub fn write_field_csv(path: &Path, field: &Field, name: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x", name])?;
    let xs = field.space.centers();
    for n in 0..field.n_time() {
        let t = field.time.t(n);
        for (x, v) in xs.iter().zip(field.slice(n)) {
            w.write_record([format!("{t:.17e}"), format!("{x:.17e}"), format!("{v:.17e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Layout: magic, `n_steps, n_cells` as u64, `horizon, x_min, x_max` as f64,
/// then the row-major values, little-endian.
pub fn write_field_bin(path: &Path, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    w.write_u64::<LittleEndian>(field.time.n_steps() as u64)?;
    w.write_u64::<LittleEndian>(field.n_cells() as u64)?;
    for v in [field.time.horizon(), field.space.x_min(), field.space.x_max()] {
        w.write_f64::<LittleEndian>(v)?;
    }
    for v in &field.values {
        w.write_f64::<LittleEndian>(*v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_bin(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 9];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Format(format!("{}: not a field file", path.display())));
    }
    let n_steps = r.read_u64::<LittleEndian>()? as usize;
    let n_cells = r.read_u64::<LittleEndian>()? as usize;
    let horizon = r.read_f64::<LittleEndian>()?;
    let x_min = r.read_f64::<LittleEndian>()?;
    let x_max = r.read_f64::<LittleEndian>()?;
    let time = TimeGrid::new(horizon, n_steps)?;
    let space = SpaceGrid::new(x_min, x_max, n_cells)?;
    let mut values = vec![0.0; time.n_nodes() * n_cells];
    r.read_f64_into::<LittleEndian>(&mut values)?;
    Field::from_values(time, space, values)
}

/// Read a two-column profile `(x, value)` with a header row and interpolate
/// it linearly onto the cell centers (constant beyond the sampled range).
pub fn read_profile_csv(path: &Path, grid: &SpaceGrid) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut pts = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Format(format!("{}: row {} needs 2 columns", path.display(), line + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Format(format!("{}: row {}: bad number {s:?}", path.display(), line + 2)))
        };
        pts.push((parse(&rec[0])?, parse(&rec[1])?));
    }
    if pts.len() < 2 {
        return Err(Error::Format(format!("{}: need at least two rows", path.display())));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(grid
        .centers()
        .iter()
        .map(|&x| {
            let k = pts.partition_point(|p| p.0 <= x);
            if k == 0 {
                pts[0].1
            } else if k == pts.len() {
                pts[k - 1].1
            } else {
                let (x0, y0) = pts[k - 1];
                let (x1, y1) = pts[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        })
        .collect())
}

/// Initial density from CSV, renormalized to unit mass.
pub fn read_initial_density(path: &Path, grid: &SpaceGrid) -> Result<Vec<f64>> {
    let raw = read_profile_csv(path, grid)?;
    if raw.iter().any(|v| *v < 0.0) {
        return Err(Error::Format(format!("{}: negative density", path.display())));
    }
    let total = raw.iter().sum::<f64>() * grid.dx();
    if !(total > 0.0) {
        return Err(Error::Format(format!("{}: density has zero mass", path.display())));
    }
    Ok(raw.into_iter().map(|v| v / total).collect())
}
