//! Trace and solution export.

use std::path::Path;

use super::solver::{MfgSolution, TraceRow};
use crate::error::Result;
use crate::fpsolver::{write_field_bin, write_field_csv};

pub fn write_trace_csv(path: &Path, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Which field formats to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FieldFormat {
    #[default]
    Csv,
    Bin,
    Both,
}

impl FieldFormat {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn bin(self) -> bool {
        matches!(self, Self::Bin | Self::Both)
    }
}

/// Write `value.*`, `density.*` and `trace.csv` into `dir`; returns the paths.
pub fn write_solution(dir: &Path, sol: &MfgSolution, format: FieldFormat) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::new();
    for (name, field) in [("value", &sol.value.v), ("density", &sol.m)] {
        if format.csv() {
            let p = dir.join(format!("{name}.csv"));
            write_field_csv(&p, field, name)?;
            written.push(p);
        }
        if format.bin() {
            let p = dir.join(format!("{name}.bin"));
            write_field_bin(&p, field)?;
            written.push(p);
        }
    }
    let p = dir.join("trace.csv");
    write_trace_csv(&p, &sol.trace)?;
    written.push(p);
    Ok(written)
}
