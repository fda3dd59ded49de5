//! Histograms of ensemble slices, 1-D Wasserstein distance, Hölder ratio.

use crate::error::{Error, Result};
use crate::grid::{Field, SpaceGrid};

use super::sde::PathEnsemble;

/// Largest mass fraction allowed outside the truncated domain.
pub const ESCAPE_LIMIT: f64 = 1e-3;

/// Histogram density of `samples` on `grid`, renormalized so `sum * dx = 1`.
/// Samples outside `[x_min, x_max)` count as escaped mass.
pub fn histogram(samples: &[f64], grid: &SpaceGrid) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::param("samples", "empty sample"));
    }
    let mut counts = vec![0u64; grid.n_cells()];
    let mut inside = 0u64;
    for &x in samples {
        if let Some(i) = grid.locate(x) {
            counts[i] += 1;
            inside += 1;
        }
    }
    let escaped = (samples.len() as u64 - inside) as f64 / samples.len() as f64;
    if escaped > ESCAPE_LIMIT {
        return Err(Error::DomainTooSmall { escaped, limit: ESCAPE_LIMIT });
    }
    let scale = 1.0 / (inside as f64 * grid.dx());
    Ok(counts.into_iter().map(|c| c as f64 * scale).collect())
}

pub fn empirical_density(ensemble: &PathEnsemble, t_index: usize, grid: &SpaceGrid) -> Result<Vec<f64>> {
    if t_index >= ensemble.n_t() {
        return Err(Error::param("t_index", format!("{t_index} out of range 0..{}", ensemble.n_t())));
    }
    histogram(&ensemble.x_slice(t_index), grid)
}

/// Histogram trajectory on the ensemble's time grid.
pub fn empirical_density_field(ensemble: &PathEnsemble, grid: &SpaceGrid) -> Result<Field> {
    let mut field = Field::zeros(ensemble.t_grid, *grid);
    for n in 0..ensemble.n_t() {
        let h = empirical_density(ensemble, n, grid)?;
        field.slice_mut(n).copy_from_slice(&h);
    }
    Ok(field)
}

const MASS_TOL: f64 = 1e-9;

/// Exact W1 between two cell-centered densities with spacing `dx`, viewed as
/// atoms at the cell centers: `dx * sum |F1 - F2|` over cell CDFs.
pub fn wasserstein1(d1: &[f64], d2: &[f64], dx: f64) -> Result<f64> {
    crate::error::check_len(d1.len(), d2.len())?;
    let m1: f64 = d1.iter().sum::<f64>() * dx;
    let m2: f64 = d2.iter().sum::<f64>() * dx;
    if (m1 - m2).abs() > MASS_TOL {
        return Err(Error::MassMismatch(m1 - m2));
    }
    let mut cdf = 0.0;
    let mut total = 0.0;
    for (a, b) in d1.iter().zip(d2) {
        cdf += (a - b) * dx;
        total += cdf.abs();
    }
    Ok(total * dx)
}

/// `max_{s != t} W1(m_t, m_s) / |t - s|^{beta/2}` over all slice pairs.
pub fn holder_ratio(m: &Field, beta: f64) -> Result<f64> {
    let n = m.n_time();
    if n < 3 {
        return Err(Error::param("trajectory", format!("need at least 3 slices, got {n}")));
    }
    let dx = m.space.dx();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let w = wasserstein1(m.slice(i), m.slice(j), dx)?;
            let gap = (m.time.t(j) - m.time.t(i)).powf(0.5 * beta);
            worst = worst.max(w / gap);
        }
    }
    Ok(worst)
}
