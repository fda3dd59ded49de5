//! Duality, monotonicity and steady-state diagnostics.

use super::coupling::CouplingSpec;
use super::solver::MfgProblem;
use crate::error::{check_len, Result};
use crate::fpsolver::assemble_generator;
use crate::fracops::{Direction, FractionalOrder, FractionalStencil, StencilKind};
use crate::grid::Field;
use crate::hjbsolver::{central_gradient, second_difference, ValueField};

/// Discrete form of the identity obtained by pairing the Fokker-Planck
/// equation with `v` and the HJB equation with `m`:
///
/// `int g m(T) - int v(0) m0 = int int (D^{1-beta} m) [H(Dv) - D_pH(Dv) Dv - G]`.
///
/// The memory operator is the solver's forward stencil; the right side sums
/// nodes `1..=N`, where the scheme applies it. Returns the absolute mismatch.
pub fn duality_residual(value: &ValueField, m: &Field, problem: &MfgProblem) -> Result<f64> {
    let v = &value.v;
    check_len(v.values.len(), m.values.len())?;
    let time = v.time;
    let space = v.space;
    let nx = space.n_cells();
    let dx = space.dx();
    let dt = time.dt();
    let last = time.n_steps();
    let xs = space.centers();

    let memory = FractionalStencil::complement(problem.beta, StencilKind::RlDerivative, Direction::Forward, time.n_nodes(), dt)?
        .with_start_correction()?
        .apply_field(&m.values, nx)?;
    let cost = problem.running_cost(m)?;
    let ham = &problem.hamiltonian;

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dx;
    let lhs = dot(v.slice(last), m.slice(last)) - dot(v.slice(0), m.slice(0));
    let mut rhs = 0.0;
    for n in 1..=last {
        let t = time.t(n);
        let p = central_gradient(v.slice(n), dx);
        let g = cost.slice(n);
        let integrand: Vec<f64> = (0..nx).map(|i| ham.h(t, xs[i], p[i]) - ham.dp(t, xs[i], p[i]) * p[i] - g[i]).collect();
        rhs += dt * dot(&memory[n * nx..(n + 1) * nx], &integrand);
    }
    Ok((lhs - rhs).abs())
}

/// `int int (m1 - m2) D^{1-beta}_{[t,T)} (G(m1) - G(m2)) dx dt` with the plain
/// backward Grunwald-Letnikov derivative.
pub fn monotonicity_probe(coupling: &CouplingSpec, m1: &Field, m2: &Field, beta: FractionalOrder) -> Result<f64> {
    check_len(m1.values.len(), m2.values.len())?;
    let time = m1.time;
    let nx = m1.n_cells();
    let g1 = coupling.evaluate(m1, beta)?;
    let g2 = coupling.evaluate(m2, beta)?;
    let dg: Vec<f64> = g1.values.iter().zip(&g2.values).map(|(a, b)| a - b).collect();
    let d = FractionalStencil::complement(beta, StencilKind::RlDerivative, Direction::Backward, time.n_nodes(), time.dt())?
        .apply_field(&dg, nx)?;
    let total: f64 = m1.values.iter().zip(&m2.values).zip(&d).map(|((a, b), c)| (a - b) * c).sum();
    Ok(total * time.dt() * m1.space.dx())
}

/// Max-norm residuals of the classical stationary system
/// `-nu v'' + H(x, v') = G(x, m) + V(x)` and `nu m'' + (D_pH(x, v') m)' = 0`
/// on single slices, with the solvers' space discretizations. The
/// Hamiltonian is evaluated at `t = 0`.
pub fn steady_state_check(v: &[f64], m: &[f64], problem: &MfgProblem) -> Result<(f64, f64)> {
    let space = problem.space;
    let nx = space.n_cells();
    check_len(nx, v.len())?;
    check_len(nx, m.len())?;
    let dx = space.dx();
    let xs = space.centers();
    let ham = &problem.hamiltonian;
    let mut g = problem.coupling.evaluate_slice(m, &space)?;
    if let Some(pot) = &problem.potential {
        g.iter_mut().zip(pot).for_each(|(a, b)| *a += b);
    }
    let p = central_gradient(v, dx);
    let lap = second_difference(v, dx);
    let res_hjb = (0..nx).map(|i| (-problem.nu * lap[i] + ham.h(0.0, xs[i], p[i]) - g[i]).abs()).fold(0.0, f64::max);
    let drift: Vec<f64> = (0..nx).map(|i| ham.feedback(0.0, xs[i], p[i])).collect();
    let a = assemble_generator(&drift, problem.nu, &space)?;
    let res_fp = a.mul(m).into_iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    Ok((res_hjb, res_fp))
}
