//! Time marching for `m_t = A[D^{1-beta}_{(0,t]} m]`.

use log::{debug, warn};

use super::generator::assemble_generator;
use crate::error::{check_len, Error, Result};
use crate::fracops::{build_stencil, Direction, FractionalOrder, FractionalStencil, StencilKind};
use crate::grid::Field;

/// Entries below `-NEGATIVITY_TOL` count as negative.
pub const NEGATIVITY_TOL: f64 = 1e-12;
const INITIAL_MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FpOptions {
    /// Clip negative entries and renormalize instead of failing. For
    /// exploratory runs only.
    pub clip_negative: bool,
    /// Solve `D^beta_{(0,t]} m = A m` instead, which does not conserve mass.
    pub ill_posed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpSolution {
    pub m: Field,
    /// Largest per-step change of total mass.
    pub max_mass_drift: f64,
    pub min_value: f64,
    /// Number of steps where clipping was applied.
    pub clipped_steps: usize,
}

pub fn mass(values: &[f64], dx: f64) -> f64 {
    values.iter().sum::<f64>() * dx
}

/// Validate an initial density: finite, nonnegative, unit mass.
pub fn check_density(m0: &[f64], dx: f64) -> Result<()> {
    if let Some(i) = m0.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::param("m0", format!("entry {i} is negative or non-finite")));
    }
    let total = mass(m0, dx);
    if (total - 1.0).abs() > INITIAL_MASS_TOL {
        return Err(Error::param("m0", format!("mass is {total}, expected 1")));
    }
    Ok(())
}

/// Fractional Fokker-Planck solve with drift `b` sampled on the same grids.
///
/// Step `n -> n+1`:
/// `(I - dt w_0 A^{n+1}) m^{n+1} = m^n + dt A^{n+1} sum_{k>=1} w_k m^{n+1-k}`,
/// where `w` are the Grunwald-Letnikov weights of order `1 - beta` plus
/// starting weights on `m^0` (see [`FractionalStencil::with_start_correction`]).
pub fn solve_fp(m0: &[f64], drift: &Field, nu: f64, beta: FractionalOrder, opts: FpOptions) -> Result<FpSolution> {
    let time = drift.time;
    let space = drift.space;
    let nx = space.n_cells();
    let dx = space.dx();
    let dt = time.dt();
    check_len(nx, m0.len())?;
    check_density(m0, dx)?;

    let stencil = if opts.ill_posed {
        build_stencil(beta, StencilKind::RlDerivative, Direction::Forward, time.n_nodes(), dt)?
    } else {
        FractionalStencil::complement(beta, StencilKind::RlDerivative, Direction::Forward, time.n_nodes(), dt)?
            .with_start_correction()?
    };
    let w = stencil.weights();
    let start = stencil.start_weights();

    let mut m = Field::zeros(time, space);
    m.slice_mut(0).copy_from_slice(m0);
    let mut max_mass_drift = 0.0f64;
    let mut min_value = m0.iter().copied().fold(f64::INFINITY, f64::min);
    let mut clipped_steps = 0;
    let mut hist = vec![0.0; nx];

    for n in 0..time.n_steps() {
        let next = n + 1;
        hist.iter_mut().for_each(|h| *h = 0.0);
        for (k, &wk) in w.iter().enumerate().take(next + 1).skip(1) {
            for (h, v) in hist.iter_mut().zip(m.slice(next - k)) {
                *h += wk * v;
            }
        }
        if let Some(c) = start {
            for (h, v) in hist.iter_mut().zip(m.slice(0)) {
                *h += c[next] * v;
            }
        }
        let a = assemble_generator(drift.slice(next), nu, &space)?;
        let sol = if opts.ill_posed {
            let rhs: Vec<f64> = hist.iter().map(|h| -h / w[0]).collect();
            a.shifted_identity(1.0 / w[0]).solve(&rhs)?
        } else {
            let ah = a.mul(&hist);
            let rhs: Vec<f64> = m.slice(n).iter().zip(&ah).map(|(p, q)| p + dt * q).collect();
            a.shifted_identity(dt * w[0]).solve(&rhs)?
        };
        m.slice_mut(next).copy_from_slice(&sol);

        let step_min = sol.iter().copied().fold(f64::INFINITY, f64::min);
        min_value = min_value.min(step_min);
        if step_min < -NEGATIVITY_TOL && !opts.ill_posed {
            if !opts.clip_negative {
                return Err(Error::Negativity { min: step_min, step: next });
            }
            warn!("clipping negative density {step_min:.3e} at step {next}");
            let slice = m.slice_mut(next);
            slice.iter_mut().for_each(|v| *v = v.max(0.0));
            let total = mass(slice, dx);
            slice.iter_mut().for_each(|v| *v /= total);
            clipped_steps += 1;
        }
        let drift_n = (mass(m.slice(next), dx) - mass(m.slice(n), dx)).abs();
        max_mass_drift = max_mass_drift.max(drift_n);
    }
    debug!("fp solve: max mass drift {max_mass_drift:.3e}, min {min_value:.3e}");
    Ok(FpSolution { m, max_mass_drift, min_value, clipped_steps })
}
