//! Hamiltonians `H(t, x, p) = sup_{|u| <= u_max} { -f(t, x, u) p - L(t, x, u) }`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default control bound.
pub const DEFAULT_U_MAX: f64 = 5.0;

pub type HamFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum HamiltonianSpec {
    /// `f = u`, `L = |u|^2 / 2` on the ball of radius `u_max`:
    /// `H(p) = p^2 / 2` for `|p| <= u_max`, `u_max |p| - u_max^2 / 2` beyond.
    TruncatedQuadratic { u_max: f64 },
    /// User-supplied `H` and `D_p H`, with a Lipschitz constant in `p`.
    Custom { h: HamFn, dp: HamFn, lipschitz: f64 },
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TruncatedQuadratic { u_max } => f.debug_struct("TruncatedQuadratic").field("u_max", u_max).finish(),
            Self::Custom { lipschitz, .. } => f.debug_struct("Custom").field("lipschitz", lipschitz).finish_non_exhaustive(),
        }
    }
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        Self::TruncatedQuadratic { u_max: DEFAULT_U_MAX }
    }
}

impl HamiltonianSpec {
    pub fn truncated_quadratic(u_max: f64) -> Result<Self> {
        if !(u_max.is_finite() && u_max > 0.0) {
            return Err(Error::param("u_max", format!("must be positive, got {u_max}")));
        }
        Ok(Self::TruncatedQuadratic { u_max })
    }

    pub fn custom(h: HamFn, dp: HamFn, lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::param("lipschitz", format!("must be nonnegative, got {lipschitz}")));
        }
        Ok(Self::Custom { h, dp, lipschitz })
    }

    /// `H = 0`, the linear problem.
    pub fn zero() -> Self {
        let z: HamFn = Arc::new(|_, _, _| 0.0);
        Self::Custom { h: z.clone(), dp: z, lipschitz: 0.0 }
    }

    pub fn h(&self, t: f64, x: f64, p: f64) -> f64 {
        match self {
            Self::TruncatedQuadratic { u_max } => {
                if p.abs() <= *u_max {
                    0.5 * p * p
                } else {
                    u_max * p.abs() - 0.5 * u_max * u_max
                }
            }
            Self::Custom { h, .. } => h(t, x, p),
        }
    }

    pub fn dp(&self, t: f64, x: f64, p: f64) -> f64 {
        match self {
            Self::TruncatedQuadratic { u_max } => p.clamp(-u_max, *u_max),
            Self::Custom { dp, .. } => dp(t, x, p),
        }
    }

    /// Optimal feedback `u* = -D_p H`, which is also the Fokker-Planck drift.
    pub fn feedback(&self, t: f64, x: f64, p: f64) -> f64 {
        -self.dp(t, x, p)
    }

    /// Lipschitz constant of `H` in `p` (the control bound for the built-in kind).
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::TruncatedQuadratic { u_max } => *u_max,
            Self::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    /// Running cost `L(u)` of the built-in kind; `None` for custom Hamiltonians.
    pub fn lagrangian(&self, u: f64) -> Option<f64> {
        match self {
            Self::TruncatedQuadratic { .. } => Some(0.5 * u * u),
            Self::Custom { .. } => None,
        }
    }
}
