//! JSON run manifest, written before and after compute.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::{Command, RunConfig};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Ok,
    Warnings,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: Command,
    pub config: RunConfig,
    pub version: &'static str,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub wall_clock_s: Option<f64>,
    pub status: Status,
    pub error: Option<String>,
    pub stages: Vec<Stage>,
    pub assertions: Vec<Assertion>,
    pub outputs: Vec<PathBuf>,
    #[serde(skip)]
    clock: Option<Instant>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: Command, config: RunConfig) -> Self {
        Self {
            command,
            config,
            version: env!("CARGO_PKG_VERSION"),
            started_unix: unix_now(),
            finished_unix: None,
            wall_clock_s: None,
            status: Status::Running,
            error: None,
            stages: Vec::new(),
            assertions: Vec::new(),
            outputs: Vec::new(),
            clock: Some(Instant::now()),
        }
    }

    /// Time a stage and record it.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.stages.push(Stage { name: name.to_string(), seconds: t.elapsed().as_secs_f64() });
        out
    }

    /// Record `measured <= limit`.
    pub fn check_le(&mut self, name: &str, measured: f64, limit: f64) {
        self.assertions.push(Assertion { name: name.to_string(), passed: measured <= limit, measured, limit });
    }

    /// Record a boolean outcome.
    pub fn check(&mut self, name: &str, passed: bool) {
        let v = if passed { 1.0 } else { 0.0 };
        self.assertions.push(Assertion { name: name.to_string(), passed, measured: v, limit: 1.0 });
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn finish(&mut self, error: Option<String>) {
        self.finished_unix = Some(unix_now());
        self.wall_clock_s = self.clock.map(|c| c.elapsed().as_secs_f64());
        self.status = match (&error, self.all_passed()) {
            (Some(_), _) => Status::Error,
            (None, true) => Status::Ok,
            (None, false) => Status::Warnings,
        };
        self.error = error;
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
