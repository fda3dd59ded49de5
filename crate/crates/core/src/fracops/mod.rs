//! Discrete fractional calculus on uniform time grids.

mod mittag_leffler;
pub mod quadrature;
mod stencil;

pub use mittag_leffler::{mittag_leffler, ml1, MittagLefflerParams};
pub use stencil::{build_stencil, grunwald_coefficients, Direction, FractionalOrder, FractionalStencil, StencilKind};

/// `<a, b> dt` on a time grid.
pub fn grid_pairing(a: &[f64], b: &[f64], dt: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dt
}
