//! Damped Picard iteration for the fractional MFG system.

use log::{info, warn};

use super::coupling::CouplingSpec;
use super::diagnostics::duality_residual;
use crate::error::{check_len, Error, Result};
use crate::fpsolver::{check_density, mass, solve_fp, FpOptions};
use crate::fracops::FractionalOrder;
use crate::grid::{Field, SpaceGrid, TimeGrid};
use crate::hjbsolver::{solve_hjb, HamiltonianSpec, HjbOptions, TerminalCost, ValueField};
use crate::subdiffusion::{holder_ratio, wasserstein1};

/// Iterations excluded from the monotone-trace check.
pub const BURN_IN: usize = 3;

#[derive(Debug, Clone)]
pub struct MfgProblem {
    pub beta: FractionalOrder,
    pub nu: f64,
    pub time: TimeGrid,
    pub space: SpaceGrid,
    pub hamiltonian: HamiltonianSpec,
    pub coupling: CouplingSpec,
    /// Time-independent potential `V(x)` added to the coupling cost.
    pub potential: Option<Vec<f64>>,
    pub terminal: TerminalCost,
    pub m0: Vec<f64>,
    /// Relaxation `theta` for every update after the first.
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
    pub hjb: HjbOptions,
    pub fp: FpOptions,
}

impl MfgProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::param("nu", format!("must be positive, got {}", self.nu)));
        }
        if self.terminal.grid != self.space {
            return Err(Error::param("terminal", "terminal cost lives on a different grid"));
        }
        check_len(self.space.n_cells(), self.m0.len())?;
        check_density(&self.m0, self.space.dx())?;
        if let Some(v) = &self.potential {
            check_len(self.space.n_cells(), v.len())?;
        }
        self.coupling.validate()?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::param("damping", format!("must lie in (0,1], got {}", self.damping)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::param("tolerance", format!("must be positive, got {}", self.tolerance)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "need at least one iteration"));
        }
        Ok(())
    }

    /// `G(t, x, m) + V(x)` along a trajectory.
    pub fn running_cost(&self, m: &Field) -> Result<Field> {
        let mut g = self.coupling.evaluate(m, self.beta)?;
        if let Some(v) = &self.potential {
            for row in g.values.chunks_mut(self.space.n_cells()) {
                row.iter_mut().zip(v).for_each(|(a, b)| *a += b);
            }
        }
        Ok(g)
    }

    /// `m0` held constant in time, the default first iterate.
    pub fn frozen_initial(&self) -> Field {
        let mut m = Field::zeros(self.time, self.space);
        for row in m.values.chunks_mut(self.space.n_cells()) {
            row.copy_from_slice(&self.m0);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TraceRow {
    pub iter: usize,
    /// `sup_t W1(m^(k+1)(t), m^(k)(t))`.
    pub gap: f64,
    pub duality_residual: f64,
    /// Largest `|mass - 1|` over the slices of the new iterate.
    pub mass_error: f64,
    pub min_m: f64,
}

#[derive(Debug, Clone)]
pub struct MfgSolution {
    pub value: ValueField,
    pub m: Field,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    /// Gap non-increasing after the burn-in iterations.
    pub trace_monotone: bool,
    pub holder_ratio: f64,
    /// `max_t int x^2 dm(t)`.
    pub max_second_moment: f64,
}

/// `sup_t W1` between two trajectories.
pub fn sup_w1(a: &Field, b: &Field) -> Result<f64> {
    check_len(a.values.len(), b.values.len())?;
    let dx = a.space.dx();
    let mut worst = 0.0f64;
    for n in 0..a.n_time() {
        worst = worst.max(wasserstein1(a.slice(n), b.slice(n), dx)?);
    }
    Ok(worst)
}

/// Solve from `m^(0) = m0` frozen in time.
pub fn solve_mfg(problem: &MfgProblem) -> Result<MfgSolution> {
    solve_mfg_from(problem, problem.frozen_initial())
}

/// Damped Picard iteration from a given first iterate. The first update
/// is undamped, so a decoupled problem converges in two iterations.
pub fn solve_mfg_from(problem: &MfgProblem, initial: Field) -> Result<MfgSolution> {
    problem.validate()?;
    if initial.time != problem.time || initial.space != problem.space {
        return Err(Error::param("initial", "first iterate lives on different grids"));
    }
    let dx = problem.space.dx();
    let mut m = initial;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut last_value = None;

    for iter in 1..=problem.max_iters {
        let cost = problem.running_cost(&m)?;
        let value = solve_hjb(&problem.terminal, &cost, problem.nu, problem.beta, &problem.hamiltonian, &problem.hjb)?;
        let image = solve_fp(&problem.m0, &value.drift, problem.nu, problem.beta, problem.fp)?.m;
        let theta = if iter == 1 { 1.0 } else { problem.damping };
        let mut next = m.clone();
        for (a, b) in next.values.iter_mut().zip(&image.values) {
            *a = (1.0 - theta) * *a + theta * b;
        }
        let gap = sup_w1(&next, &m)?;
        let duality = duality_residual(&value, &image, problem)?;
        let mass_error = next.slices().map(|s| (mass(s, dx) - 1.0).abs()).fold(0.0, f64::max);
        let min_m = next.values.iter().copied().fold(f64::INFINITY, f64::min);
        trace.push(TraceRow { iter, gap, duality_residual: duality, mass_error, min_m });
        info!("picard {iter}: gap {gap:.3e}, duality {duality:.3e}");
        m = next;
        last_value = Some(value);
        if gap <= problem.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("no convergence after {} Picard iterations", problem.max_iters);
    }

    let trace_monotone = trace.windows(2).skip(BURN_IN).all(|w| w[1].gap <= w[0].gap);
    if !trace_monotone {
        warn!("fixed-point gap is not monotone after burn-in");
    }
    let holder = holder_ratio(&m, problem.beta.value())?;
    let xs = problem.space.centers();
    let max_second_moment = m.slices().map(|s| s.iter().zip(&xs).map(|(v, x)| v * x * x).sum::<f64>() * dx).fold(0.0, f64::max);
    Ok(MfgSolution {
        value: last_value.expect("at least one iteration"),
        m,
        trace,
        converged,
        trace_monotone,
        holder_ratio: holder,
        max_second_moment,
    })
}

/// The reference problem: `beta = 0.7`, `nu = 0.05`, `T = 1` on `[-2, 2)`,
/// truncated quadratic Hamiltonian, smoothed local coupling with
/// `kappa = 0.5`, terminal cost `cos(pi x / 2) / 2` and a Gaussian initial
/// density centered at `-0.5`.
pub fn desk_problem(n_cells: usize, n_steps: usize) -> Result<MfgProblem> {
    let time = TimeGrid::new(1.0, n_steps)?;
    let space = SpaceGrid::new(-2.0, 2.0, n_cells)?;
    let terminal = TerminalCost::from_fn(space, |x| 0.5 * (std::f64::consts::FRAC_PI_2 * x).cos())?;
    Ok(MfgProblem {
        beta: FractionalOrder::new(0.7)?,
        nu: 0.05,
        time,
        space,
        hamiltonian: HamiltonianSpec::default(),
        coupling: CouplingSpec::smoothed_local(0.5),
        potential: None,
        terminal,
        m0: gaussian_density(&space, -0.5, 0.3),
        damping: 0.5,
        tolerance: 1e-6,
        max_iters: 60,
        hjb: HjbOptions::default(),
        fp: FpOptions::default(),
    })
}

/// Periodic Gaussian bump normalized to unit discrete mass.
pub fn gaussian_density(space: &SpaceGrid, center: f64, width: f64) -> Vec<f64> {
    let l = space.length();
    let raw: Vec<f64> = space
        .centers()
        .iter()
        .map(|x| {
            let d = (x - center).rem_euclid(l);
            let d = d.min(l - d);
            (-0.5 * (d / width).powi(2)).exp()
        })
        .collect();
    let total = mass(&raw, space.dx());
    raw.into_iter().map(|v| v / total).collect()
}
