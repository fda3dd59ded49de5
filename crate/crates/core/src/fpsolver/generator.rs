//! Conservative finite-volume generator `A m = nu m_xx - (b m)_x` on a
//! periodic cell-centered grid.

use crate::error::{Error, Result};
use crate::grid::SpaceGrid;
use crate::linalg::CyclicTridiagonal;

/// Face fluxes `F_{i+1/2} = b_f m_up - nu (m_{i+1} - m_i) / dx` with the face
/// drift `b_f` the average of the adjacent centers and `m_up` the upwind
/// cell. A zero face drift contributes no advective flux, which coincides
/// with the central flux. Every column of the result sums to zero.
pub fn assemble_generator(drift: &[f64], nu: f64, grid: &SpaceGrid) -> Result<CyclicTridiagonal> {
    let n = grid.n_cells();
    crate::error::check_len(n, drift.len())?;
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::param("nu", format!("must be nonnegative, got {nu}")));
    }
    if let Some(i) = drift.iter().position(|b| !b.is_finite()) {
        return Err(Error::param("drift", format!("non-finite drift at cell {i}")));
    }
    let dx = grid.dx();
    let diff = nu / dx;
    let mut a = CyclicTridiagonal::zeros(n);
    for i in 0..n {
        let j = (i + 1) % n;
        let bf = 0.5 * (drift[i] + drift[j]);
        // Flux through face i+1/2 is `left * m_i + right * m_j`.
        let left = (bf.max(0.0) + diff) / dx;
        let right = (bf.min(0.0) - diff) / dx;
        a.diag[i] -= left;
        a.upper[i] -= right;
        a.lower[j] += left;
        a.diag[j] += right;
    }
    Ok(a)
}

/// Largest time step for which the explicit part keeps off-diagonals
/// dominant: `dx^2 / (2 nu + dx max|b|)`.
pub fn positivity_step_bound(drift_max: f64, nu: f64, grid: &SpaceGrid) -> f64 {
    let dx = grid.dx();
    dx * dx / (2.0 * nu + dx * drift_max.abs())
}
