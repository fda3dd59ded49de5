//! Finite-volume solver for the time-fractional Fokker-Planck equation on a
//! periodic domain.

mod generator;
mod io;
mod solver;
mod weak;

pub use generator::{assemble_generator, positivity_step_bound};
pub use io::{read_field_bin, read_initial_density, read_profile_csv, write_field_bin, write_field_csv, FIELD_MAGIC};
pub use solver::{check_density, mass, solve_fp, FpOptions, FpSolution, NEGATIVITY_TOL};
pub use weak::{check_weak_form, TestFunction};

/// A density trajectory `m(t, x)`.
pub type DensityField = crate::grid::Field;
