//! Convolution stencils for Riemann-Liouville and Caputo operators on a
//! uniform time grid.
//!
//! Every stencil is a single weight vector `w_0..w_{N-1}`. The forward
//! operator is the lower-triangular Toeplitz matrix `L[n][j] = w_{n-j}`, the
//! backward operator the upper-triangular `U[n][j] = w_{j-n}`, so `U = L^T`
//! holds exactly and grid pairings satisfy `<L u, f> = <u, U f>` to rounding.
//!
//! * RL derivatives use Grunwald-Letnikov weights, first order. Node 0 is the
//!   length-one history sum `w_0 f_0`; it is not a pointwise approximation of
//!   the singular derivative there.
//! * RL integrals use Grunwald-Letnikov weights of negative order, first
//!   order. Their generating function is the reciprocal of the derivative's,
//!   so the discrete `D^mu` and `I^mu` are exact inverses and integrals
//!   compose exactly: `I^a I^b = I^(a+b)`.
//! * Caputo derivatives use the L1 scheme (order `2 - mu` on smooth input),
//!   applied to `f - f(boundary)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::special::rgamma;

/// An order in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::param("order", format!("order must lie in (0,1], got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - value`, the order of the memory operator `D^(1-beta)`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(o: FractionalOrder) -> f64 {
        o.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StencilKind {
    RlDerivative,
    RlIntegral,
    CaputoDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// History on `(0, t]`.
    Forward,
    /// History on `[t, T)`.
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalStencil {
    order: f64,
    kind: StencilKind,
    direction: Direction,
    dt: f64,
    weights: Vec<f64>,
    start: Option<StartCorrection>,
}

/// Rank-one boundary correction: an extra column at the initial node
/// (`transposed = false`) or, after transposition, an extra row.
#[derive(Debug, Clone, PartialEq)]
struct StartCorrection {
    weights: Vec<f64>,
    transposed: bool,
}

/// Grunwald-Letnikov coefficients of `(1 - z)^order`, any real order.
pub fn grunwald_coefficients(order: f64, n: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(n);
    if n == 0 {
        return g;
    }
    g.push(1.0);
    for k in 1..n {
        let prev = g[k - 1];
        g.push(prev * (1.0 - (order + 1.0) / k as f64));
    }
    g
}

fn l1_weights(order: f64, n: usize, dt: f64) -> Vec<f64> {
    let p = 1.0 - order;
    // b_0 = 1 for every order; powf(0, 0) = 1 would zero it at order 1.
    let b = |k: usize| if k == 0 { 1.0 } else { (k as f64 + 1.0).powf(p) - (k as f64).powf(p) };
    let scale = dt.powf(-order) * rgamma(2.0 - order);
    let mut w = Vec::with_capacity(n);
    w.push(scale * b(0));
    for k in 1..n {
        w.push(scale * (b(k) - b(k - 1)));
    }
    w
}

/// Build the stencil of the given order, kind and direction.
pub fn build_stencil(
    order: FractionalOrder,
    kind: StencilKind,
    direction: Direction,
    n_nodes: usize,
    dt: f64,
) -> Result<FractionalStencil> {
    FractionalStencil::with_order(order.value(), kind, direction, n_nodes, dt)
}

impl FractionalStencil {
    /// Like [`build_stencil`] but accepts order `0`, which yields the
    /// identity for derivatives and integrals alike. Used for the memory
    /// operators of order `1 - beta` that degenerate when `beta = 1`.
    pub fn with_order(order: f64, kind: StencilKind, direction: Direction, n_nodes: usize, dt: f64) -> Result<Self> {
        if !(order.is_finite() && (0.0..=1.0).contains(&order)) {
            return Err(Error::param("order", format!("order must lie in (0,1], got {order}")));
        }
        if order == 0.0 && kind == StencilKind::CaputoDerivative {
            return Err(Error::param("order", "Caputo derivative of order 0 is not defined"));
        }
        if n_nodes < 2 {
            return Err(Error::param("n_nodes", format!("need at least 2 nodes, got {n_nodes}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let weights = match kind {
            StencilKind::RlDerivative => {
                let scale = dt.powf(-order);
                grunwald_coefficients(order, n_nodes).into_iter().map(|g| g * scale).collect()
            }
            StencilKind::RlIntegral => {
                let scale = dt.powf(order);
                grunwald_coefficients(-order, n_nodes).into_iter().map(|g| g * scale).collect()
            }
            StencilKind::CaputoDerivative => l1_weights(order, n_nodes, dt),
        };
        Ok(Self { order, kind, direction, dt, weights, start: None })
    }

    /// Stencil of order `1 - beta` (the memory operator of the fractional
    /// Fokker-Planck and HJB equations).
    pub fn complement(beta: FractionalOrder, kind: StencilKind, direction: Direction, n_nodes: usize, dt: f64) -> Result<Self> {
        Self::with_order(beta.complement(), kind, direction, n_nodes, dt)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same weights, opposite direction: the matrix transpose.
    pub fn transposed(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        let start = self.start.as_ref().map(|c| StartCorrection { weights: c.weights.clone(), transposed: !c.transposed });
        Self { direction, start, ..self.clone() }
    }

    /// Add starting weights to an RL derivative so that it is the exact
    /// difference quotient of a discrete integral which (a) vanishes at the
    /// initial node and (b) integrates constants exactly. This removes the
    /// `O(dt^(1-mu))` start-up error of the plain Grunwald-Letnikov sum when
    /// the stencil drives a time-stepping scheme. Row 0 becomes zero. Order 0
    /// is returned unchanged.
    pub fn with_start_correction(mut self) -> Result<Self> {
        if self.kind != StencilKind::RlDerivative {
            return Err(Error::param("stencil", "starting weights apply to RL derivatives only"));
        }
        if self.order == 0.0 || self.start.is_some() {
            return Ok(self);
        }
        let n = self.n_nodes();
        let iota = 1.0 - self.order;
        let dt = self.dt;
        let a = grunwald_coefficients(-iota, n);
        let scale = dt.powf(iota);
        let mut cumulative = 0.0;
        let mut prev = 0.0;
        let mut weights = Vec::with_capacity(n);
        for (k, ak) in a.iter().enumerate() {
            cumulative += ak;
            let exact = (k as f64 * dt).powf(iota) * rgamma(1.0 + iota);
            let s = exact - scale * cumulative;
            weights.push((s - prev) / dt);
            prev = s;
        }
        self.start = Some(StartCorrection { weights, transposed: false });
        Ok(self)
    }

    /// Nonzero `(row, col, value)` entries of the starting correction.
    fn start_entries(&self) -> Vec<(usize, usize, f64)> {
        let Some(c) = &self.start else { return Vec::new() };
        let last = self.n_nodes() - 1;
        let w = &c.weights;
        (0..=last)
            .map(|i| match (c.transposed, self.direction) {
                (false, Direction::Forward) => (i, 0, w[i]),
                (false, Direction::Backward) => (i, last, w[last - i]),
                (true, Direction::Backward) => (0, i, w[i]),
                (true, Direction::Forward) => (last, i, w[last - i]),
            })
            .filter(|e| e.2 != 0.0)
            .collect()
    }

    /// Starting weights by distance from the boundary node, if any.
    pub fn start_weights(&self) -> Option<&[f64]> {
        self.start.as_ref().map(|c| &c.weights[..])
    }

    pub fn has_start_correction(&self) -> bool {
        self.start.is_some()
    }

    /// Dense matrix entry `(n, j)`. For Caputo stencils this is the matrix
    /// acting on `f - f(boundary)`.
    pub fn entry(&self, n: usize, j: usize) -> f64 {
        let base = match self.direction {
            Direction::Forward if j <= n => self.weights[n - j],
            Direction::Backward if j >= n => self.weights[j - n],
            _ => 0.0,
        };
        let extra: f64 = self.start_entries().iter().filter(|e| e.0 == n && e.1 == j).map(|e| e.2).sum();
        base + extra
    }

    fn boundary_index(&self) -> usize {
        match self.direction {
            Direction::Forward => 0,
            Direction::Backward => self.n_nodes() - 1,
        }
    }

    /// Apply to a sampled time series.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_nodes(), samples.len())?;
        let shifted;
        let input = if self.kind == StencilKind::CaputoDerivative {
            let b = samples[self.boundary_index()];
            shifted = samples.iter().map(|v| v - b).collect::<Vec<_>>();
            &shifted[..]
        } else {
            samples
        };
        Ok(self.convolve(input))
    }

    fn convolve(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let w = &self.weights;
        let mut out = vec![0.0; n];
        match self.direction {
            Direction::Forward => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..=i).map(|k| w[k] * f[i - k]).sum();
                }
            }
            Direction::Backward => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..n - i).map(|k| w[k] * f[i + k]).sum();
                }
            }
        }
        for (r, c, v) in self.start_entries() {
            out[r] += v * f[c];
        }
        out
    }

    /// Apply along time to every column of a row-major `(n_nodes, width)`
    /// field. Columns never mix.
    pub fn apply_field(&self, values: &[f64], width: usize) -> Result<Vec<f64>> {
        let n = self.n_nodes();
        check_len(n * width, values.len())?;
        let mut input = values.to_vec();
        if self.kind == StencilKind::CaputoDerivative {
            let b = self.boundary_index();
            let boundary = values[b * width..(b + 1) * width].to_vec();
            for row in input.chunks_mut(width) {
                for (v, c) in row.iter_mut().zip(&boundary) {
                    *v -= c;
                }
            }
        }
        let mut out = vec![0.0; n * width];
        for row in 0..n {
            let dst = &mut out[row * width..(row + 1) * width];
            let hist = match self.direction {
                Direction::Forward => row + 1,
                Direction::Backward => n - row,
            };
            for k in 0..hist {
                let src_row = match self.direction {
                    Direction::Forward => row - k,
                    Direction::Backward => row + k,
                };
                let wk = self.weights[k];
                let src = &input[src_row * width..(src_row + 1) * width];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += wk * s;
                }
            }
        }
        for (r, c, v) in self.start_entries() {
            for i in 0..width {
                out[r * width + i] += v * input[c * width + i];
            }
        }
        Ok(out)
    }

    /// Discrete image of the constant sequence `1` at every node. For RL
    /// derivatives this is the grid analogue of `(t - a)^(-mu) / Gamma(1 - mu)`.
    pub fn constant_response(&self) -> Vec<f64> {
        let n = self.n_nodes();
        let mut partial = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &self.weights {
            acc += w;
            partial.push(acc);
        }
        let mut out: Vec<f64> = match self.direction {
            Direction::Forward => partial,
            Direction::Backward => partial.into_iter().rev().collect(),
        };
        for (r, _, v) in self.start_entries() {
            out[r] += v;
        }
        out
    }

    /// Regularized Caputo derivative `D f - D[1] f(boundary)` built from an
    /// RL stencil. The correction uses the stencil's own response to the
    /// constant, so constants map to exactly zero and node 0 stays finite.
    pub fn regularized_caputo(&self, samples: &[f64], boundary_value: f64) -> Result<Vec<f64>> {
        if self.kind != StencilKind::RlDerivative {
            return Err(Error::param("stencil", "regularized Caputo needs an RL derivative stencil"));
        }
        let mut out = self.apply(samples)?;
        for (o, c) in out.iter_mut().zip(self.constant_response()) {
            *o -= c * boundary_value;
        }
        Ok(out)
    }
}
