//! Suites, scenarios, checkpoints, CSV tables and run manifests on disk.

use std::fs;
use std::path::{Path, PathBuf};

use dynopt_core::bench::Suite;
use dynopt_core::navsim::Scenario;
use dynopt_core::policy::{checkpoint, PolicyParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

/// Build identifier baked in at compile time (`version-gitdescribe`).
pub const BUILD_ID: &str = env!("DYNOPT_BUILD_ID");

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

// Suites and scenarios are JSON rather than TOML: instance seeds use the
// full u64 range, which TOML integers cannot hold.
fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Config {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes to JSON")
}

pub fn save_suite(suite: &Suite, path: &Path) -> Result<()> {
    write_text(path, &to_json(suite))
}

pub fn load_suite(path: &Path) -> Result<Suite> {
    let suite: Suite = read_json(path)?;
    for inst in suite.train.iter().chain(&suite.test) {
        inst.validate()?;
    }
    Ok(suite)
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    write_text(path, &to_json(scenario))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let s: Scenario = read_json(path)?;
    s.validate()?;
    Ok(s)
}

pub fn save_checkpoint(params: &PolicyParams<f32>, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    fs::write(path, checkpoint::encode(params)).map_err(|e| HarnessError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<PolicyParams<f32>> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    checkpoint::decode(&bytes).map_err(|source| HarnessError::Checkpoint {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(HarnessError::MissingFile(path.to_path_buf()));
    }
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Everything needed to replay a CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub argv: Vec<String>,
    pub build_id: String,
    pub seed: u64,
    pub config: RunConfig,
    pub outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(command: &str, argv: &[String], config: &RunConfig) -> Self {
        Manifest {
            command: command.to_string(),
            argv: argv.to_vec(),
            build_id: BUILD_ID.to_string(),
            seed: config.seed,
            config: config.clone(),
            outputs: Vec::new(),
        }
    }

    /// Writes `manifest-<command>.json` into `dir` and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("manifest-{}.json", self.command));
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_text(&path, &text)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }
}
