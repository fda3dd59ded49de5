//! Uniform discretizations of the time horizon and of the truncated spatial domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `t_n = n * dt`, `n = 0..=n_steps`, on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param("horizon", format!("must be positive, got {horizon}")));
        }
        if n_steps < 1 {
            return Err(Error::param("n_steps", "need at least one time step"));
        }
        Ok(Self { horizon, n_steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.n_steps {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|n| self.t(n)).collect()
    }

    /// Same horizon, `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self { horizon: self.horizon, n_steps: self.n_steps * factor }
    }
}

/// Periodic cell-centered grid on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

pub const MIN_CELLS: usize = 8;

impl SpaceGrid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::param("domain", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::param("n_cells", format!("need at least {MIN_CELLS} cells, got {n_cells}")));
        }
        Ok(Self { x_min, x_max, n_cells })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Cell index containing `x`, or `None` outside `[x_min, x_max)`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.x_min && x < self.x_max) {
            return None;
        }
        let i = ((x - self.x_min) / self.dx()) as usize;
        Some(i.min(self.n_cells - 1))
    }

    /// Map `x` into the fundamental period.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.length();
        let y = (x - self.x_min).rem_euclid(l);
        self.x_min + y
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self { n_cells: self.n_cells * factor, ..*self }
    }

    /// Periodic linear interpolation of cell-centered `values` at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let n = self.n_cells;
        let s = (self.wrap(x) - self.x_min) / self.dx() - 0.5;
        let fl = s.floor();
        let frac = s - fl;
        let i0 = (fl as i64).rem_euclid(n as i64) as usize;
        let i1 = (i0 + 1) % n;
        values[i0] * (1.0 - frac) + values[i1] * frac
    }
}

/// Row-major `(n_time, n_cells)` field on a time grid and space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub time: TimeGrid,
    pub space: SpaceGrid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(time: TimeGrid, space: SpaceGrid) -> Self {
        Self { time, space, values: vec![0.0; time.n_nodes() * space.n_cells()] }
    }

    pub fn from_fn(time: TimeGrid, space: SpaceGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(time, space);
        let nx = space.n_cells();
        for n in 0..time.n_nodes() {
            let t = time.t(n);
            for i in 0..nx {
                field.values[n * nx + i] = f(t, space.center(i));
            }
        }
        field
    }

    pub fn from_values(time: TimeGrid, space: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        crate::error::check_len(time.n_nodes() * space.n_cells(), values.len())?;
        Ok(Self { time, space, values })
    }

    pub fn n_time(&self) -> usize {
        self.time.n_nodes()
    }

    pub fn n_cells(&self) -> usize {
        self.space.n_cells()
    }

    pub fn slice(&self, n: usize) -> &[f64] {
        let nx = self.n_cells();
        &self.values[n * nx..(n + 1) * nx]
    }

    pub fn slice_mut(&mut self, n: usize) -> &mut [f64] {
        let nx = self.n_cells();
        &mut self.values[n * nx..(n + 1) * nx]
    }

    pub fn slices(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_cells())
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}
