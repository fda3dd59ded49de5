//! Fractional Mean Field Games: couplings, damped Picard solver and
//! diagnostics.

mod coupling;
mod diagnostics;
mod io;
mod solver;

pub use coupling::{mollifier, CouplingKind, CouplingSpec, GammaMap};
pub use diagnostics::{duality_residual, monotonicity_probe, steady_state_check};
pub use io::{write_solution, write_trace_csv, FieldFormat};
pub use solver::{desk_problem, gaussian_density, solve_mfg, solve_mfg_from, sup_w1, MfgProblem, MfgSolution, TraceRow, BURN_IN};
