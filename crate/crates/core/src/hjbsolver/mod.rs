//! Fractional Hamilton-Jacobi-Bellman solver, spectral oracle for the linear
//! problem, and Monte Carlo value estimation.

mod hamiltonian;
mod mild;
mod montecarlo;
mod solver;

pub use hamiltonian::{HamFn, HamiltonianSpec, DEFAULT_U_MAX};
pub use mild::mild_solution_linear;
pub use montecarlo::{dpp_residual, estimate_value_mc, Control, McCosts, McEstimate, RunningCost};
pub use solver::{
    caputo_residual, central_gradient, laplacian, second_difference, solve_hjb, standard_clock_source, CostClock, HjbOptions,
    TerminalCost, ValueField,
};
