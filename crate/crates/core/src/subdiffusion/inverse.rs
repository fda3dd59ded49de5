//! Stable subordinator paths on an operational-time grid and their inverses
//! by staircase inversion.

use rand::Rng;

use super::stable::{sample_standard, standard_median};
use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::grid::TimeGrid;

/// Largest operational step as a fraction of `T^beta`. The right-point
/// staircase overestimates `E_t` by less than one step, so this bounds the
/// relative bias of `E[E_T]` by roughly 0.1%.
const MAX_STEP_FRACTION: f64 = 2e-3;

/// `D` sampled at `tau_k = k * d_tau`, up to the first value `>= T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    pub d_tau: f64,
    pub d_values: Vec<f64>,
    pub beta: FractionalOrder,
}

impl SubordinatorPath {
    pub fn tau(&self, k: usize) -> f64 {
        k as f64 * self.d_tau
    }
}

/// `E_t` on a physical time grid, plus the operational index realizing each
/// value (`E_{t_n} = tau_{hit[n]}`).
#[derive(Debug, Clone, PartialEq)]
pub struct InversePath {
    pub t_grid: TimeGrid,
    pub e_values: Vec<f64>,
    pub hit_index: Vec<usize>,
}

/// Samples subordinator/inverse pairs for a fixed order and time grid.
#[derive(Debug, Clone, Copy)]
pub struct InverseSampler {
    beta: FractionalOrder,
    t_grid: TimeGrid,
    d_tau: f64,
}

impl InverseSampler {
    /// Operational step from the median rule: the median `D` increment is
    /// `dt / 4`, then halved until below `MAX_STEP_FRACTION * T^beta`.
    /// For `beta = 1` the operational grid is the physical one.
    pub fn new(beta: FractionalOrder, t_grid: TimeGrid) -> Self {
        let b = beta.value();
        let d_tau = if beta.is_classical() {
            t_grid.dt()
        } else {
            let mut step = (t_grid.dt() / (4.0 * standard_median(b))).powf(b);
            let cap = MAX_STEP_FRACTION * t_grid.horizon().powf(b);
            while step > cap {
                step *= 0.5;
            }
            step
        };
        Self { beta, t_grid, d_tau }
    }

    /// Explicit operational step, for refinement studies.
    pub fn with_step(beta: FractionalOrder, t_grid: TimeGrid, d_tau: f64) -> Result<Self> {
        if !(d_tau.is_finite() && d_tau > 0.0) {
            return Err(Error::param("d_tau", format!("must be positive, got {d_tau}")));
        }
        if beta.is_classical() && d_tau != t_grid.dt() {
            return Err(Error::param("d_tau", "beta = 1 uses the physical time step"));
        }
        Ok(Self { beta, t_grid, d_tau })
    }

    /// Halve the operational step `times` times (no-op for `beta = 1`).
    pub fn refined(self, times: u32) -> Self {
        if self.beta.is_classical() {
            return self;
        }
        Self { d_tau: self.d_tau / 2f64.powi(times as i32), ..self }
    }

    pub fn d_tau(&self) -> f64 {
        self.d_tau
    }

    pub fn beta(&self) -> FractionalOrder {
        self.beta
    }

    pub fn t_grid(&self) -> TimeGrid {
        self.t_grid
    }

    /// Simulate `D` until it reaches the horizon. The operational grid grows
    /// as needed; it is never truncated.
    pub fn sample_subordinator<R: Rng + ?Sized>(&self, rng: &mut R) -> SubordinatorPath {
        let horizon = self.t_grid.horizon();
        let d_values = if self.beta.is_classical() {
            self.t_grid.nodes()
        } else {
            let b = self.beta.value();
            let scale = self.d_tau.powf(1.0 / b);
            let mut d = Vec::with_capacity(64);
            let mut acc = 0.0;
            d.push(acc);
            while acc < horizon {
                acc += scale * sample_standard(b, rng);
                d.push(acc);
            }
            d
        };
        SubordinatorPath { d_tau: self.d_tau, d_values, beta: self.beta }
    }

    /// `E_t = tau_k` for the first `k` with `D_k >= t`. Nondecreasing, with
    /// `E_0 = 0` and `D_{E_t} >= t`.
    pub fn invert(&self, path: &SubordinatorPath) -> InversePath {
        let n = self.t_grid.n_nodes();
        let mut e_values = Vec::with_capacity(n);
        let mut hit_index = Vec::with_capacity(n);
        let mut k = 0;
        for i in 0..n {
            let t = self.t_grid.t(i);
            while path.d_values[k] < t {
                k += 1;
            }
            hit_index.push(k);
            e_values.push(if self.beta.is_classical() { t } else { path.tau(k) });
        }
        InversePath { t_grid: self.t_grid, e_values, hit_index }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (SubordinatorPath, InversePath) {
        let d = self.sample_subordinator(rng);
        let e = self.invert(&d);
        (d, e)
    }
}

/// One inverse path with the default operational step.
pub fn build_inverse_path<R: Rng + ?Sized>(beta: FractionalOrder, t_grid: TimeGrid, rng: &mut R) -> InversePath {
    InverseSampler::new(beta, t_grid).sample(rng).1
}
