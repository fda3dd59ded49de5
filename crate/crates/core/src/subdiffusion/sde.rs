//! Time-changed SDEs `X_t = Y_{E_t}` simulated in operational time.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::inverse::InverseSampler;
use crate::error::{check_len, Error, Result};
use crate::fracops::FractionalOrder;
use crate::grid::{SpaceGrid, TimeGrid};

pub type CoefFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Drift `b(t, x)` and diffusion `sigma(t, x)` with their declared Lipschitz
/// constant `L` and sup bound `M`.
#[derive(Clone)]
pub struct CoefficientSpec {
    drift: CoefFn,
    diffusion: CoefFn,
    pub lipschitz: f64,
    pub bound: f64,
}

impl fmt::Debug for CoefficientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSpec").field("lipschitz", &self.lipschitz).field("bound", &self.bound).finish_non_exhaustive()
    }
}

impl CoefficientSpec {
    pub fn new(drift: CoefFn, diffusion: CoefFn, lipschitz: f64, bound: f64) -> Self {
        Self { drift, diffusion, lipschitz, bound }
    }

    pub fn constant(b: f64, sigma: f64) -> Self {
        Self::new(Arc::new(move |_, _| b), Arc::new(move |_, _| sigma), 0.0, b.abs() + sigma.abs())
    }

    /// Pure diffusion with generator `nu * d^2/dx^2`.
    pub fn brownian(nu: f64) -> Self {
        Self::constant(0.0, (2.0 * nu).sqrt())
    }

    pub fn drift(&self, t: f64, x: f64) -> f64 {
        (self.drift)(t, x)
    }

    pub fn diffusion(&self, t: f64, x: f64) -> f64 {
        (self.diffusion)(t, x)
    }

    /// Spot-check `|b| + |sigma| <= M` and the Lipschitz bound in `x` on a
    /// sampled lattice of `[0, horizon] x [x_lo, x_hi]`.
    pub fn validate(&self, horizon: f64, x_lo: f64, x_hi: f64) -> Result<()> {
        const NT: usize = 9;
        const NX: usize = 65;
        let slack = 1.0 + 1e-9;
        for i in 0..NT {
            let t = horizon * i as f64 / (NT - 1) as f64;
            let xs: Vec<f64> = (0..NX).map(|j| x_lo + (x_hi - x_lo) * j as f64 / (NX - 1) as f64).collect();
            let vals: Vec<(f64, f64)> = xs.iter().map(|&x| (self.drift(t, x), self.diffusion(t, x))).collect();
            for (j, &(b, s)) in vals.iter().enumerate() {
                if !(b.is_finite() && s.is_finite()) {
                    return Err(Error::param("coefficients", format!("non-finite at t={t}, x={}", xs[j])));
                }
                if b.abs() + s.abs() > self.bound * slack {
                    return Err(Error::param(
                        "coefficients",
                        format!("|b| + |sigma| = {} exceeds M = {} at t={t}, x={}", b.abs() + s.abs(), self.bound, xs[j]),
                    ));
                }
            }
            for j in 0..NX {
                for k in j + 1..NX {
                    let diff = (vals[j].0 - vals[k].0).abs() + (vals[j].1 - vals[k].1).abs();
                    let q = diff / (xs[k] - xs[j]);
                    if q > self.lipschitz * slack + 1e-12 {
                        return Err(Error::param(
                            "coefficients",
                            format!("difference quotient {q} exceeds L = {} at t={t}", self.lipschitz),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Monte Carlo ensemble of `E_t` and `X_t` paths on a common time grid.
/// Path data are row-major `(n_paths, n_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub n_paths: usize,
    pub dim: usize,
    pub seed: u64,
    pub beta: FractionalOrder,
    pub t_grid: TimeGrid,
    pub e_paths: Vec<f64>,
    pub x_paths: Vec<f64>,
}

impl PathEnsemble {
    pub fn n_t(&self) -> usize {
        self.t_grid.n_nodes()
    }

    pub fn x(&self, path: usize, n: usize) -> f64 {
        self.x_paths[path * self.n_t() + n]
    }

    pub fn e(&self, path: usize, n: usize) -> f64 {
        self.e_paths[path * self.n_t() + n]
    }

    /// All states at time index `n`.
    pub fn x_slice(&self, n: usize) -> Vec<f64> {
        (0..self.n_paths).map(|p| self.x(p, n)).collect()
    }

    pub fn e_slice(&self, n: usize) -> Vec<f64> {
        (0..self.n_paths).map(|p| self.e(p, n)).collect()
    }
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Independent, reproducible stream for one path.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Euler-Maruyama for `dY = b(D_tau, Y) dtau + sigma(D_tau, Y) dB_tau` on the
/// operational grid, composed as `X_t = Y_{E_t}`.
pub fn simulate_time_changed_sde(
    coeffs: &CoefficientSpec,
    x0: f64,
    sampler: &InverseSampler,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    if !x0.is_finite() {
        return Err(Error::param("x0", "must be finite"));
    }
    simulate_with(coeffs, sampler, n_paths, seed, |_| x0)
}

/// As [`simulate_time_changed_sde`], with each path's starting point drawn
/// from the cell-centered density `m0` (uniform within a cell) using the
/// path's own stream.
pub fn simulate_from_density(
    coeffs: &CoefficientSpec,
    m0: &[f64],
    grid: &SpaceGrid,
    sampler: &InverseSampler,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    check_len(grid.n_cells(), m0.len())?;
    if m0.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::param("m0", "density must be finite and nonnegative"));
    }
    let mut cdf = Vec::with_capacity(m0.len());
    let mut acc = 0.0;
    for v in m0 {
        acc += v;
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::param("m0", "density has zero mass"));
    }
    let grid = *grid;
    simulate_with(coeffs, sampler, n_paths, seed, move |rng| {
        let u: f64 = rng.gen::<f64>() * acc;
        let i = cdf.partition_point(|c| *c <= u).min(cdf.len() - 1);
        let offset: f64 = rng.gen();
        grid.x_min() + (i as f64 + offset) * grid.dx()
    })
}

fn simulate_with(
    coeffs: &CoefficientSpec,
    sampler: &InverseSampler,
    n_paths: usize,
    seed: u64,
    start: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
) -> Result<PathEnsemble> {
    if n_paths == 0 {
        return Err(Error::param("n_paths", "need at least one path"));
    }
    let t_grid = sampler.t_grid();
    let n_t = t_grid.n_nodes();
    let dtau = sampler.d_tau();
    let sqrt_dtau = dtau.sqrt();

    let simulate = |p: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rng = path_rng(seed, p);
        let x0 = start(&mut rng);
        let (d, e) = sampler.sample(&mut rng);
        let last = *e.hit_index.last().expect("grid has nodes");
        let mut xs = Vec::with_capacity(n_t);
        let mut y = x0;
        let mut next = 0;
        for k in 0..=last {
            while next < n_t && e.hit_index[next] == k {
                xs.push(y);
                next += 1;
            }
            if k == last {
                break;
            }
            let t = d.d_values[k];
            let xi: f64 = StandardNormal.sample(&mut rng);
            y += coeffs.drift(t, y) * dtau + coeffs.diffusion(t, y) * sqrt_dtau * xi;
            if !y.is_finite() {
                return Err(Error::NonFiniteState { path: p, step: k + 1 });
            }
        }
        Ok((e.e_values, xs))
    };

    let results: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n_paths).into_par_iter().map(simulate).collect();
    let mut e_paths = Vec::with_capacity(n_paths * n_t);
    let mut x_paths = Vec::with_capacity(n_paths * n_t);
    for r in results {
        let (e, x) = r?;
        e_paths.extend(e);
        x_paths.extend(x);
    }
    Ok(PathEnsemble { n_paths, dim: 1, seed, beta: sampler.beta(), t_grid, e_paths, x_paths })
}

/// Ensemble of inverse-subordinator paths alone.
pub fn simulate_inverse_ensemble(sampler: &InverseSampler, n_paths: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n_paths == 0 {
        return Err(Error::param("n_paths", "need at least one path"));
    }
    Ok((0..n_paths).into_par_iter().map(|p| sampler.sample(&mut path_rng(seed, p)).1.e_values).collect())
}
