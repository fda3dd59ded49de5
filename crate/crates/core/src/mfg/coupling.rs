//! Monotone couplings `G(x, m)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::fracops::{Direction, FractionalOrder, FractionalStencil, StencilKind};
use crate::grid::{Field, SpaceGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// `G = kappa (rho_eps * m)`.
    SmoothedLocal,
    /// `G = kappa I^{1-beta}_{[t,T)} gamma(m)`.
    FractionalIntegralLocal,
}

/// Increasing map applied pointwise to the density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaMap {
    Identity,
    /// `m^exponent`, `exponent > 0`.
    Power {
        exponent: f64,
    },
    /// `ln(1 + m)`.
    Log1p,
}

impl GammaMap {
    pub fn apply(self, m: f64) -> f64 {
        match self {
            Self::Identity => m,
            Self::Power { exponent } => m.max(0.0).powf(exponent),
            Self::Log1p => m.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub kappa: f64,
    /// Mollifier width; `None` means four cells.
    pub epsilon: Option<f64>,
    pub gamma: GammaMap,
}

impl CouplingSpec {
    pub fn smoothed_local(kappa: f64) -> Self {
        Self { kind: CouplingKind::SmoothedLocal, kappa, epsilon: None, gamma: GammaMap::Identity }
    }

    pub fn fractional_integral_local(kappa: f64, gamma: GammaMap) -> Self {
        Self { kind: CouplingKind::FractionalIntegralLocal, kappa, epsilon: None, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::param("kappa", format!("must be nonnegative, got {}", self.kappa)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::param("epsilon", format!("must be positive, got {eps}")));
            }
        }
        if let GammaMap::Power { exponent } = self.gamma {
            if !(exponent.is_finite() && exponent > 0.0) {
                return Err(Error::param("gamma", format!("exponent must be positive, got {exponent}")));
            }
        }
        Ok(())
    }

    pub fn width(&self, grid: &SpaceGrid) -> f64 {
        self.epsilon.unwrap_or(4.0 * grid.dx())
    }

    /// Coupling cost along a density trajectory.
    pub fn evaluate(&self, m: &Field, beta: FractionalOrder) -> Result<Field> {
        self.validate()?;
        let space = m.space;
        let nx = space.n_cells();
        match self.kind {
            CouplingKind::SmoothedLocal => {
                let kernel = mollifier(&space, self.width(&space));
                let mut out = Field::zeros(m.time, space);
                for n in 0..m.n_time() {
                    let smooth = convolve(&kernel, m.slice(n), space.dx());
                    for (o, s) in out.slice_mut(n).iter_mut().zip(smooth) {
                        *o = self.kappa * s;
                    }
                }
                Ok(out)
            }
            CouplingKind::FractionalIntegralLocal => {
                let time = m.time;
                let stencil =
                    FractionalStencil::complement(beta, StencilKind::RlIntegral, Direction::Backward, time.n_nodes(), time.dt())?;
                let mapped: Vec<f64> = m.values.iter().map(|&v| self.gamma.apply(v)).collect();
                let values = stencil.apply_field(&mapped, nx)?.into_iter().map(|v| self.kappa * v).collect();
                Field::from_values(time, space, values)
            }
        }
    }

    /// Time-independent coupling `G(x, m)` of one slice. Only the smoothed
    /// kind has one.
    pub fn evaluate_slice(&self, m: &[f64], grid: &SpaceGrid) -> Result<Vec<f64>> {
        self.validate()?;
        check_len(grid.n_cells(), m.len())?;
        match self.kind {
            CouplingKind::SmoothedLocal => {
                let kernel = mollifier(grid, self.width(grid));
                Ok(convolve(&kernel, m, grid.dx()).into_iter().map(|v| self.kappa * v).collect())
            }
            CouplingKind::FractionalIntegralLocal => {
                Err(Error::param("coupling", "the fractional integral coupling depends on time"))
            }
        }
    }
}

/// Periodic Gaussian of width `eps` indexed by cell offset, with unit
/// discrete mass (`sum * dx = 1`).
pub fn mollifier(grid: &SpaceGrid, eps: f64) -> Vec<f64> {
    let n = grid.n_cells();
    let dx = grid.dx();
    let l = grid.length();
    let mut k: Vec<f64> = (0..n)
        .map(|j| {
            let d = j as f64 * dx;
            let d = d.min(l - d);
            (-0.5 * (d / eps).powi(2)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum::<f64>() * dx;
    k.iter_mut().for_each(|v| *v /= total);
    k
}

/// Periodic convolution `(k * m)_i = sum_j k_{i-j} m_j dx`.
fn convolve(kernel: &[f64], m: &[f64], dx: f64) -> Vec<f64> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| kernel[(i + n - j) % n] * m[j]).sum::<f64>() * dx).collect()
}
