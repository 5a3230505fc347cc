//! Config-driven batch experiments with deterministic CSV and JSON output.

mod config;
mod presets;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind, Instance, PSpec, Plan, Sizes, Typicality};

use crate::error::{Error, Result};

/// Rows and aggregates produced by one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub plan: Plan,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
    /// False when a validation run found a failing check.
    pub passed: bool,
}

impl Report {
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = format!("# config_hash={}\n", self.plan.hash()).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    pub fn json_value(&self) -> Value {
        json!({
            "name": self.plan.name,
            "experiment": self.plan.experiment.name(),
            "config_hash": self.plan.hash(),
            "seed": self.plan.seed,
            "config": self.plan,
            "passed": self.passed,
            "summary": self.summary,
        })
    }

    pub fn json_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(&self.json_value())?;
        out.push(b'\n');
        Ok(out)
    }

    /// Write `<name>.csv` and `<name>.json` under `dir` and return their paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.plan.name));
        let json_path = dir.join(format!("{}.json", self.plan.name));
        std::fs::write(&csv_path, self.csv_bytes()?)?;
        std::fs::write(&json_path, self.json_bytes()?)?;
        Ok((csv_path, json_path))
    }
}

/// Run a resolved plan on a worker pool of `plan.threads` threads.
pub fn run(plan: &Plan) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| presets::dispatch(plan))
}

/// Resolve and run.
pub fn run_config(config: &ExperimentConfig) -> Result<Report> {
    run(&config.resolve()?)
}
