//! Run reports: every subcommand writes a JSON sidecar echoing its
//! configuration and summarizing the result.
//!
//! The report is diagnostic metadata (it carries wall-clock timing), not one
//! of the run's data outputs; the byte-determinism guarantee applies to the
//! files listed in `outputs`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use rws_core::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub threads: usize,
    pub timing_ms: f64,
    pub result: Value,
    pub outputs: Vec<String>,
}

pub struct ReportBuilder {
    command: String,
    config: Value,
    seed: u64,
    threads: usize,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl ReportBuilder {
    pub fn new(command: &str, config: Value, seed: u64, threads: usize) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            threads,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes the report next to the primary output (or to the explicit
    /// path) and returns its location.
    pub fn write(self, result: Value, report_path: &Path) -> Result<PathBuf> {
        let report = RunReport {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            config: self.config,
            seed: self.seed,
            threads: self.threads,
            timing_ms: self.started.elapsed().as_secs_f64() * 1e3,
            result,
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| rws_core::Error::InvalidInput(format!("report serialization: {e}")))?;
        std::fs::write(report_path, text + "\n")?;
        Ok(report_path.to_path_buf())
    }
}

/// Default report location: `<output>.report.json`.
pub fn default_report_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.as_os_str().to_os_string();
    name.push(".report.json");
    PathBuf::from(name)
}

/// JSON-safe float: infinities and NaN become strings.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}
