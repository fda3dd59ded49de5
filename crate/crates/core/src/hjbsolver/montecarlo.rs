//! Monte Carlo cost of controlled time-changed dynamics
//! `dX_s = u_s dE_s + sqrt(2 nu) dB_{E_s}` with the backward clock
//! `E_s = T - Ebar_{T-s}`.

use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::solver::{CostClock, TerminalCost, ValueField};
use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::grid::{Field, SpaceGrid, TimeGrid};
use crate::subdiffusion::{mean_var, path_rng, InverseSampler};

/// Running cost `L(t, x, u)`.
pub type RunningCost = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy)]
pub enum Control<'a> {
    /// Feedback `u(t_n, x)` read from a drift field by periodic interpolation.
    Feedback(&'a Field),
    Constant(f64),
}

#[derive(Clone)]
pub struct McCosts<'a> {
    pub running: RunningCost,
    /// Coupling cost `G(t, x)` on the grid, if any.
    pub source: Option<&'a Field>,
    pub terminal: &'a TerminalCost,
    pub clock: CostClock,
}

impl<'a> McCosts<'a> {
    /// `L = u^2 / 2` with the given source and terminal cost.
    pub fn quadratic(source: Option<&'a Field>, terminal: &'a TerminalCost) -> Self {
        Self { running: Arc::new(|_, _, u| 0.5 * u * u), source, terminal, clock: CostClock::Internal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

struct Run<'a> {
    costs: &'a McCosts<'a>,
    control: Control<'a>,
    nu: f64,
    sampler: InverseSampler,
    space: SpaceGrid,
    start: usize,
    stop: usize,
}

impl Run<'_> {
    /// Cost accumulated on `[t_start, t_stop]` along one path, plus the
    /// final state.
    fn path(&self, x0: f64, seed: u64, p: usize) -> (f64, f64) {
        let time = self.sampler.t_grid();
        let last = time.n_steps();
        let dt = time.dt();
        let mut rng = path_rng(seed, p);
        let (_, ebar) = self.sampler.sample(&mut rng);
        let e = &ebar.e_values;
        let mut x = x0;
        let mut cost = 0.0;
        for n in self.start..self.stop {
            let t = time.t(n);
            let de = e[last - n] - e[last - n - 1];
            let u = match self.control {
                Control::Feedback(f) => self.space.interpolate(f.slice(n), x),
                Control::Constant(u) => u,
            };
            let g = self.costs.source.map_or(0.0, |f| self.space.interpolate(f.slice(n), x));
            let weight = match self.costs.clock {
                CostClock::Internal => de,
                CostClock::Standard => dt,
            };
            cost += ((self.costs.running)(t, x, u) + g) * weight;
            if de > 0.0 {
                let xi: f64 = StandardNormal.sample(&mut rng);
                x += u * de + (2.0 * self.nu * de).sqrt() * xi;
            }
        }
        (cost, x)
    }

    fn estimate(&self, x0: f64, n_paths: usize, seed: u64, end: impl Fn(f64) -> f64 + Sync) -> McEstimate {
        let samples: Vec<f64> = (0..n_paths)
            .into_par_iter()
            .map(|p| {
                let (c, x) = self.path(x0, seed, p);
                c + end(x)
            })
            .collect();
        let (mean, var) = mean_var(&samples);
        McEstimate { mean, std_error: (var / n_paths as f64).sqrt(), n_paths }
    }
}

fn check_inputs(time: &TimeGrid, t_index: usize, stop: usize, x0: f64, n_paths: usize, nu: f64) -> Result<()> {
    if n_paths < 2 {
        return Err(Error::param("n_paths", "need at least two paths"));
    }
    if t_index > stop || stop > time.n_steps() {
        return Err(Error::param("t_index", format!("need t_index <= {stop} <= {}", time.n_steps())));
    }
    if !x0.is_finite() {
        return Err(Error::param("x0", "must be finite"));
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::param("nu", format!("must be nonnegative, got {nu}")));
    }
    Ok(())
}

/// Estimate `J(t, x, u) = E[int_t^T (L + G) dE_s + g(X_T)]` with `t = t_index * dt`.
/// The dynamics are `f(t, x, u) = u`, matching the truncated quadratic Hamiltonian.
#[allow(clippy::too_many_arguments)]
pub fn estimate_value_mc(
    costs: &McCosts,
    control: Control,
    nu: f64,
    beta: FractionalOrder,
    time: TimeGrid,
    t_index: usize,
    x0: f64,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(&time, t_index, time.n_steps(), x0, n_paths, nu)?;
    let space = costs.terminal.grid;
    let run = Run { costs, control, nu, sampler: InverseSampler::new(beta, time), space, start: t_index, stop: time.n_steps() };
    let g = &costs.terminal.values;
    Ok(run.estimate(x0, n_paths, seed, |x| space.interpolate(g, x)))
}

/// Signed `E[int_t^theta (L + G) dE + v(theta, X_theta)] - v(t, x)` under
/// the feedback of `value`, for grid times `t <= theta`.
#[allow(clippy::too_many_arguments)]
pub fn dpp_residual(
    value: &ValueField,
    costs: &McCosts,
    nu: f64,
    beta: FractionalOrder,
    t_index: usize,
    theta_index: usize,
    x0: f64,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    let time = value.v.time;
    let space = value.v.space;
    check_inputs(&time, t_index, theta_index, x0, n_paths, nu)?;
    let v_here = space.interpolate(value.v.slice(t_index), x0);
    if theta_index == t_index {
        return Ok(McEstimate { mean: 0.0, std_error: 0.0, n_paths });
    }
    let run = Run {
        costs,
        control: Control::Feedback(&value.drift),
        nu,
        sampler: InverseSampler::new(beta, time),
        space,
        start: t_index,
        stop: theta_index,
    };
    let v_theta = value.v.slice(theta_index);
    let est = run.estimate(x0, n_paths, seed, |x| space.interpolate(v_theta, x));
    Ok(McEstimate { mean: est.mean - v_here, ..est })
}
