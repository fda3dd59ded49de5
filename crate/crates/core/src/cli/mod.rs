//! Configuration, manifests and the command pipelines behind the binary.

mod config;
mod manifest;
mod run;
mod validate;

pub use config::{
    Command, FpSection, HjbSection, InitialKind, InitialSection, MfgSection, OutputSection, ProblemSection, RunConfig,
    SimulateSection, TerminalKind,
};
pub use manifest::{Assertion, RunManifest, Stage, Status};
pub use run::{mfg_problem, run, second_moment_exponent, EXIT_ERROR, EXIT_WARNINGS};
pub use validate::{run_battery, write_battery_csv, BatteryRow};
