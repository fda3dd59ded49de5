//! Binary ensemble files and CSV summaries.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::sde::{mean_var, PathEnsemble};
use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::grid::TimeGrid;

pub const ENSEMBLE_MAGIC: &[u8; 9] = b"FMFG-ENS1";

/// Layout: magic, then `n_paths, dim, n_steps, seed` as u64 and
/// `beta, horizon` as f64, then the time nodes, `E` paths and `X` paths,
/// all little-endian doubles in path-major order.
pub fn write_ensemble(path: &Path, ens: &PathEnsemble) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(ENSEMBLE_MAGIC)?;
    for v in [ens.n_paths as u64, ens.dim as u64, ens.t_grid.n_steps() as u64, ens.seed] {
        w.write_u64::<LittleEndian>(v)?;
    }
    w.write_f64::<LittleEndian>(ens.beta.value())?;
    w.write_f64::<LittleEndian>(ens.t_grid.horizon())?;
    for v in ens.t_grid.nodes().iter().chain(&ens.e_paths).chain(&ens.x_paths) {
        w.write_f64::<LittleEndian>(*v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ensemble(path: &Path) -> Result<PathEnsemble> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 9];
    r.read_exact(&mut magic)?;
    if &magic != ENSEMBLE_MAGIC {
        return Err(Error::Format(format!("{}: not an ensemble file", path.display())));
    }
    let n_paths = r.read_u64::<LittleEndian>()? as usize;
    let dim = r.read_u64::<LittleEndian>()? as usize;
    let n_steps = r.read_u64::<LittleEndian>()? as usize;
    let seed = r.read_u64::<LittleEndian>()?;
    let beta = FractionalOrder::new(r.read_f64::<LittleEndian>()?)?;
    let t_grid = TimeGrid::new(r.read_f64::<LittleEndian>()?, n_steps)?;
    let n_t = t_grid.n_nodes();
    let mut read_vec = |len: usize| -> Result<Vec<f64>> {
        let mut v = vec![0.0; len];
        r.read_f64_into::<LittleEndian>(&mut v)?;
        Ok(v)
    };
    let nodes = read_vec(n_t)?;
    if nodes != t_grid.nodes() {
        return Err(Error::Format("time nodes disagree with the header".into()));
    }
    let e_paths = read_vec(n_paths * n_t)?;
    let x_paths = read_vec(n_paths * n_t * dim)?;
    Ok(PathEnsemble { n_paths, dim, seed, beta, t_grid, e_paths, x_paths })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-node summary: `t, mean_x, var_x, q05, q50, q95, mean_e`.
pub fn write_summary_csv(path: &Path, ens: &PathEnsemble) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "mean_x", "var_x", "q05", "q50", "q95", "mean_e"])?;
    for n in 0..ens.n_t() {
        let mut xs = ens.x_slice(n);
        let (mean, var) = mean_var(&xs);
        xs.sort_by(f64::total_cmp);
        let (mean_e, _) = mean_var(&ens.e_slice(n));
        let row = [ens.t_grid.t(n), mean, var, quantile(&xs, 0.05), quantile(&xs, 0.5), quantile(&xs, 0.95), mean_e];
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}
