//! Discrete weak-form residual of the fractional Fokker-Planck equation.

use crate::error::{check_len, Result};
use crate::fracops::{Direction, FractionalOrder, FractionalStencil, StencilKind};
use crate::grid::Field;

/// Smooth test function `phi(t, x)` with its first two space derivatives.
pub struct TestFunction<'a> {
    pub value: &'a dyn Fn(f64, f64) -> f64,
    pub dx: &'a dyn Fn(f64, f64) -> f64,
    pub dxx: &'a dyn Fn(f64, f64) -> f64,
}

/// `| int phi(0) dm_0 + int int [phi_t + D^{1-beta}_{[t,T)} (b phi_x + nu phi_xx)] dm |`
/// evaluated by summation by parts in time:
///
/// `<phi^0, m^0> + sum_n <phi^{n+1} - phi^n, m^n> + dt sum_n <m^n, (W^T psi)^n>`,
///
/// with `W^T` the transpose of the solver's memory matrix and `psi^0 = 0`
/// (the scheme never applies the generator at the initial node). `phi` must
/// vanish at `T`.
pub fn check_weak_form(m: &Field, drift: &Field, nu: f64, beta: FractionalOrder, phi: &TestFunction) -> Result<f64> {
    check_len(m.values.len(), drift.values.len())?;
    let time = m.time;
    let space = m.space;
    let nx = space.n_cells();
    let dx = space.dx();
    let dt = time.dt();
    let xs = space.centers();
    let phi_at = |n: usize| -> Vec<f64> { xs.iter().map(|&x| (phi.value)(time.t(n), x)).collect() };

    let mut psi = Field::zeros(time, space);
    for n in 1..time.n_nodes() {
        let t = time.t(n);
        let b = drift.slice(n);
        for (i, &x) in xs.iter().enumerate() {
            psi.values[n * nx + i] = b[i] * (phi.dx)(t, x) + nu * (phi.dxx)(t, x);
        }
    }
    let back = FractionalStencil::complement(beta, StencilKind::RlDerivative, Direction::Forward, time.n_nodes(), dt)?
        .with_start_correction()?
        .transposed();
    let memory = back.apply_field(&psi.values, nx)?;

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut total = dot(&phi_at(0), m.slice(0));
    let mut prev = phi_at(0);
    for n in 0..time.n_steps() {
        let cur = phi_at(n + 1);
        let diff: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| a - b).collect();
        total += dot(&diff, m.slice(n));
        prev = cur;
    }
    for n in 0..time.n_nodes() {
        total += dt * dot(&memory[n * nx..(n + 1) * nx], m.slice(n));
    }
    Ok((total * dx).abs())
}
