//! Two-parameter Mittag-Leffler function `E_{a,g}(z)` on the real axis.
//!
//! * `z >= 0` and small negative `z`: power series, summed in log space so
//!   large `Gamma` arguments do not overflow.
//! * `z < 0` with `g > 1`: the recurrence `E_{a,g}(z) = (E_{a,g-a}(z) - 1/Gamma(g-a)) / z`
//!   lowers `g` into `(0, 1]`.
//! * `z < 0` with `g <= 1 < 1 + a`: real-axis Laplace inversion,
//!
//!   `E_{a,g}(-x) = 1/(a pi) Int_0^inf exp(-u^{1/a}) u^{(1-g)/a}
//!                  [u sin(g pi) + x sin((g-a) pi)] / (u^2 + 2 x u cos(a pi) + x^2) du`,
//!
//!   integrated by adaptive Gauss-Kronrod with breakpoints at the
//!   denominator's near-pole.

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::special::{ln_gamma, rgamma};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MittagLefflerParams {
    pub alpha: f64,
    pub gamma: f64,
    pub z: f64,
}

impl MittagLefflerParams {
    pub fn new(alpha: f64, gamma: f64, z: f64) -> Self {
        Self { alpha, gamma, z }
    }
}

const SERIES_RADIUS: f64 = 5.0;
const MAX_CONDITION: f64 = 1e3;
const MAX_TERMS: usize = 2000;

pub fn mittag_leffler(params: MittagLefflerParams) -> Result<f64> {
    let MittagLefflerParams { alpha, gamma, z } = params;
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0,1], got {alpha}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    if z.is_nan() {
        return Err(Error::param("z", "NaN argument"));
    }
    eval(alpha, gamma, z)
}

/// `E_a(z) = E_{a,1}(z)`.
pub fn ml1(alpha: f64, z: f64) -> Result<f64> {
    mittag_leffler(MittagLefflerParams::new(alpha, 1.0, z))
}

fn eval(alpha: f64, gamma: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(rgamma(gamma));
    }
    if alpha == 1.0 {
        if gamma == 1.0 {
            return Ok(z.exp());
        }
        if gamma == 2.0 {
            return Ok(z.exp_m1() / z);
        }
    }
    if z > 0.0 {
        return series(alpha, gamma, z).map(|(s, _)| s);
    }
    if -z <= SERIES_RADIUS {
        if let Ok((s, cond)) = series(alpha, gamma, z) {
            if cond <= MAX_CONDITION {
                return Ok(s);
            }
        }
    }
    if gamma > 1.0 {
        let lower = eval(alpha, gamma - alpha, z)?;
        return Ok((lower - rgamma(gamma - alpha)) / z);
    }
    if alpha == 1.0 {
        return Err(Error::numerical("mittag_leffler", format!("no evaluation route for alpha = 1, gamma = {gamma}, z = {z}")));
    }
    laplace_inversion(alpha, gamma, -z)
}

/// Power series and its condition number `sum |t_k| / |sum t_k|`.
fn series(alpha: f64, gamma: f64, z: f64) -> Result<(f64, f64)> {
    let lz = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let arg = alpha * k as f64 + gamma;
        let mag = (k as f64 * lz - ln_gamma(arg)).exp();
        if !mag.is_finite() {
            return Err(Error::numerical("mittag_leffler", format!("series overflow at z = {z}")));
        }
        let term = if negative && k % 2 == 1 { -mag } else { mag };
        sum += term;
        abs_sum += mag;
        // Terms eventually decrease monotonically; stop once they are
        // negligible and shrinking.
        if k > 2 && mag <= prev && mag <= 1e-17 * abs_sum {
            let cond = if sum == 0.0 { f64::INFINITY } else { abs_sum / sum.abs() };
            return Ok((sum, cond));
        }
        prev = mag;
    }
    Err(Error::numerical("mittag_leffler", format!("series did not converge at z = {z}")))
}

fn laplace_inversion(alpha: f64, gamma: f64, x: f64) -> Result<f64> {
    let (s_g, s_ga) = ((gamma * PI).sin(), ((gamma - alpha) * PI).sin());
    let c = (alpha * PI).cos();
    let inv_a = 1.0 / alpha;
    let p = (1.0 - gamma) / alpha;
    let f = |u: f64| {
        if u <= 0.0 {
            return if p == 0.0 { s_ga / x } else { 0.0 };
        }
        let num = u * s_g + x * s_ga;
        let den = u * u + 2.0 * x * u * c + x * x;
        (-u.powf(inv_a)).exp() * u.powf(p) * num / den
    };
    let upper = 60f64.powf(alpha);
    let mut breaks = vec![1.0f64.min(upper * 0.5)];
    if c < 0.0 {
        let peak = -x * c;
        let width = x * (alpha * PI).sin();
        breaks.extend([peak - width, peak, peak + width, peak - 0.1 * width, peak + 0.1 * width]);
    }
    let r = integrate(f, 0.0, upper, &breaks, 1e-12, 1e-300, 4000).ok_or_else(|| {
        Error::numerical(
            "mittag_leffler",
            format!("Laplace inversion did not converge for alpha = {alpha}, gamma = {gamma}, z = {}", -x),
        )
    })?;
    Ok(r.value / (alpha * PI))
}
