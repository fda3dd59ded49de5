//! Backward marching for `-v_t + D^{1-beta}_{[t,T)} [-nu v_xx + H(Dv) - G] = 0`.

use std::path::Path;

use log::{debug, warn};

use super::hamiltonian::HamiltonianSpec;
use crate::error::{check_len, Error, Result};
use crate::fpsolver::read_profile_csv;
use crate::fracops::{build_stencil, Direction, FractionalOrder, FractionalStencil, StencilKind};
use crate::grid::{Field, SpaceGrid};
use crate::linalg::CyclicTridiagonal;

/// Which clock weights the running cost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostClock {
    /// `dE_s`: cost accrues only while the agent moves.
    #[default]
    Internal,
    /// `ds`: the source is replaced by `I^beta_{[t,T)} G` inside the bracket.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjbOptions {
    /// Monitored bound on `|D^2 v|`; exceeding it flags the result.
    pub d2_bound: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub clock: CostClock,
}

impl Default for HjbOptions {
    fn default() -> Self {
        Self { d2_bound: 1e3, newton_tol: 1e-10, max_newton: 50, clock: CostClock::Internal }
    }
}

/// Terminal cost `g` sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalCost {
    pub grid: SpaceGrid,
    pub values: Vec<f64>,
}

impl TerminalCost {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        check_len(grid.n_cells(), values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("g", format!("non-finite terminal cost at cell {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpaceGrid, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.centers().into_iter().map(g).collect())
    }

    pub fn constant(grid: SpaceGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.n_cells()])
    }

    /// Read `(x, g)` rows and interpolate to the grid.
    pub fn read_csv(path: &Path, grid: SpaceGrid) -> Result<Self> {
        Self::new(grid, read_profile_csv(path, &grid)?)
    }

    /// `max |g''|` by second differences, the smoothness surrogate.
    pub fn max_second_difference(&self) -> f64 {
        max_second_difference(&self.values, self.grid.dx())
    }
}

/// Value function with its gradient and optimal feedback drift.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueField {
    pub v: Field,
    pub gradient: Field,
    /// `-D_p H(t, x, Dv)`.
    pub drift: Field,
    pub max_d2: f64,
    /// `max_d2` exceeded the configured bound.
    pub d2_flagged: bool,
    /// Most Newton iterations any step needed.
    pub max_newton_used: usize,
}

impl ValueField {
    /// Recompute gradient and drift for given values.
    pub fn from_values(v: Field, ham: &HamiltonianSpec, d2_bound: f64) -> Self {
        let time = v.time;
        let space = v.space;
        let nx = space.n_cells();
        let xs = space.centers();
        let mut gradient = Field::zeros(time, space);
        let mut drift = Field::zeros(time, space);
        let mut max_d2 = 0.0f64;
        for n in 0..time.n_nodes() {
            let t = time.t(n);
            let p = central_gradient(v.slice(n), space.dx());
            for i in 0..nx {
                drift.values[n * nx + i] = ham.feedback(t, xs[i], p[i]);
            }
            gradient.slice_mut(n).copy_from_slice(&p);
            max_d2 = max_d2.max(max_second_difference(v.slice(n), space.dx()));
        }
        Self { v, gradient, drift, max_d2, d2_flagged: max_d2 > d2_bound, max_newton_used: 0 }
    }
}

/// Periodic central difference.
pub fn central_gradient(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * dx)).collect()
}

/// Periodic second difference.
pub fn second_difference(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - 2.0 * v[i] + v[(i + n - 1) % n]) / (dx * dx)).collect()
}

fn max_second_difference(v: &[f64], dx: f64) -> f64 {
    second_difference(v, dx).into_iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// `nu` times the periodic three-point Laplacian.
pub fn laplacian(nu: f64, grid: &SpaceGrid) -> CyclicTridiagonal {
    let n = grid.n_cells();
    let s = nu / (grid.dx() * grid.dx());
    CyclicTridiagonal { lower: vec![s; n], diag: vec![-2.0 * s; n], upper: vec![s; n] }
}

/// `I^beta_{[t,T)} G`, the source seen by the HJB equation when the running
/// cost is paid in standard time.
pub fn standard_clock_source(source: &Field, beta: FractionalOrder) -> Result<Field> {
    let time = source.time;
    let stencil = build_stencil(beta, StencilKind::RlIntegral, Direction::Backward, time.n_nodes(), time.dt())?;
    let values = stencil.apply_field(&source.values, source.n_cells())?;
    Field::from_values(time, source.space, values)
}

/// Bracket `-nu v_xx + H(t, x, Dv) - G` at one node.
fn bracket(v: &[f64], g: &[f64], t: f64, nu: f64, ham: &HamiltonianSpec, grid: &SpaceGrid) -> Vec<f64> {
    let dx = grid.dx();
    let p = central_gradient(v, dx);
    let lap = second_difference(v, dx);
    (0..v.len()).map(|i| -nu * lap[i] + ham.h(t, grid.center(i), p[i]) - g[i]).collect()
}

/// Solve the fractional HJB equation backward from `v(T) = g`.
///
/// Node `n` (marching down from `N`):
/// `v^n + dt sum_{j>=n} S_{nj} F^j = v^{n+1}` with `F = -nu v_xx + H(Dv) - G`
/// and `S` the backward RL stencil of order `1 - beta` with starting
/// weights at `T`. Each node is fully implicit and solved by Newton's
/// method; the Jacobian stays cyclic tridiagonal.
pub fn solve_hjb(
    g: &TerminalCost,
    source: &Field,
    nu: f64,
    beta: FractionalOrder,
    ham: &HamiltonianSpec,
    opts: &HjbOptions,
) -> Result<ValueField> {
    let time = source.time;
    let space = source.space;
    if g.grid != space {
        return Err(Error::param("g", "terminal cost lives on a different grid"));
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::param("nu", format!("must be nonnegative, got {nu}")));
    }
    if let Some(i) = source.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::param("source", format!("non-finite entry {i}")));
    }
    let source = match opts.clock {
        CostClock::Internal => source.clone(),
        CostClock::Standard => standard_clock_source(source, beta)?,
    };
    let nx = space.n_cells();
    let dt = time.dt();
    let last = time.n_steps();
    let xs = space.centers();

    let stencil = FractionalStencil::complement(beta, StencilKind::RlDerivative, Direction::Backward, time.n_nodes(), dt)?
        .with_start_correction()?;
    let w = stencil.weights();
    let start = stencil.start_weights();
    let w0 = w[0];
    let implicit = laplacian(nu, &space).shifted_identity(dt * w0);

    let mut v = Field::zeros(time, space);
    let mut brackets = Field::zeros(time, space);
    v.slice_mut(last).copy_from_slice(&g.values);
    let top = bracket(&g.values, source.slice(last), time.t(last), nu, ham, &space);
    brackets.slice_mut(last).copy_from_slice(&top);
    let mut max_newton_used = 0;
    let mut hist = vec![0.0; nx];

    for n in (0..last).rev() {
        let t = time.t(n);
        hist.iter_mut().for_each(|h| *h = 0.0);
        for j in n + 1..=last {
            let mut s = w[j - n];
            if let (Some(c), true) = (start, j == last) {
                s += c[last - n];
            }
            for (h, f) in hist.iter_mut().zip(brackets.slice(j)) {
                *h += s * f;
            }
        }
        let base: Vec<f64> = v.slice(n + 1).iter().zip(&hist).map(|(a, h)| a - dt * h).collect();
        let gn = source.slice(n);

        let mut iterate = v.slice(n + 1).to_vec();
        let mut iters = 0;
        let mut jac = implicit.clone();
        let half = 0.5 / space.dx();
        loop {
            let p = central_gradient(&iterate, space.dx());
            let mut res = implicit.mul(&iterate);
            for i in 0..nx {
                res[i] += dt * w0 * (ham.h(t, xs[i], p[i]) - gn[i]) - base[i];
                let slope = dt * w0 * ham.dp(t, xs[i], p[i]) * half;
                jac.lower[i] = implicit.lower[i] - slope;
                jac.upper[i] = implicit.upper[i] + slope;
            }
            let step = jac.solve(&res)?;
            let change = step.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            iterate.iter_mut().zip(&step).for_each(|(u, d)| *u -= d);
            let scale = iterate.iter().fold(1.0f64, |a, b| a.max(b.abs()));
            iters += 1;
            if change <= opts.newton_tol * scale {
                break;
            }
            if iters >= opts.max_newton || !change.is_finite() {
                return Err(Error::NewtonDiverged { step: n, iterations: iters, change });
            }
        }
        max_newton_used = max_newton_used.max(iters);
        let f = bracket(&iterate, gn, t, nu, ham, &space);
        brackets.slice_mut(n).copy_from_slice(&f);
        v.slice_mut(n).copy_from_slice(&iterate);
    }

    let mut out = ValueField::from_values(v, ham, opts.d2_bound);
    out.max_newton_used = max_newton_used;
    if out.d2_flagged {
        warn!("|D^2 v| reached {:.3e}, above the monitored bound {:.3e}", out.max_d2, opts.d2_bound);
    }
    debug!("hjb solve: {max_newton_used} Newton iterations max, |D^2 v| <= {:.3e}", out.max_d2);
    Ok(out)
}

/// Pointwise residual of the Caputo form
/// `d^beta_{[t,T)} v - nu v_xx + H(Dv) - G` for `t < T`, with the Caputo
/// derivative by the L1 scheme. The last slice is left at zero.
pub fn caputo_residual(
    value: &ValueField,
    source: &Field,
    nu: f64,
    beta: FractionalOrder,
    ham: &HamiltonianSpec,
) -> Result<Field> {
    let v = &value.v;
    check_len(v.values.len(), source.values.len())?;
    let time = v.time;
    let space = v.space;
    let nx = space.n_cells();
    let caputo = build_stencil(beta, StencilKind::CaputoDerivative, Direction::Backward, time.n_nodes(), time.dt())?;
    let dv = caputo.apply_field(&v.values, nx)?;
    let mut out = Field::zeros(time, space);
    for n in 0..time.n_steps() {
        let f = bracket(v.slice(n), source.slice(n), time.t(n), nu, ham, &space);
        for i in 0..nx {
            out.values[n * nx + i] = dv[n * nx + i] + f[i];
        }
    }
    Ok(out)
}
