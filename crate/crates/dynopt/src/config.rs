//! Run configuration, read from TOML. Every field has a default, so an empty
//! file is a valid config.

use std::path::{Path, PathBuf};

use dynopt_core::bench::SuiteParams;
use dynopt_core::mdp::HyperBounds;
use dynopt_core::navsim::NavConfig;
use dynopt_core::policy::PolicyConfig;
use dynopt_core::ppo::{apply_ablation, AblationFlags, TrainConfig, Wiring};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Environment variable that replaces `out_dir`.
pub const OUT_ENV: &str = "DYNOPT_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Independent evaluation runs per test instance.
    pub runs: usize,
    /// Navigation episodes per case.
    pub episodes: usize,
    pub out_dir: PathBuf,
    pub suite: SuiteParams,
    pub train: TrainConfig,
    pub policy: PolicyConfig,
    pub bounds: HyperBounds,
    pub ablation: AblationFlags,
    pub nav: NavConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            runs: 10,
            episodes: 10,
            out_dir: PathBuf::from("out"),
            suite: SuiteParams::default(),
            train: TrainConfig::default(),
            policy: PolicyConfig::default(),
            bounds: HyperBounds::default(),
            ablation: AblationFlags::default(),
            nav: NavConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| HarnessError::Config {
            path: path.to_path_buf(),
            msg: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.policy.validate()?;
        self.wiring()?;
        if self.runs == 0 || self.episodes == 0 {
            return Err(dynopt_core::Error::Config("runs and episodes must be positive").into());
        }
        if self.suite.dim == 0 || self.suite.fe_max == 0 || !(self.suite.lower < self.suite.upper) {
            return Err(dynopt_core::Error::Config("suite needs dim > 0, fe_max > 0 and lower < upper").into());
        }
        Ok(())
    }

    pub fn wiring(&self) -> Result<Wiring> {
        Ok(apply_ablation(&self.ablation, self.bounds)?)
    }

    /// Architecture with the action head sized for the configured wiring.
    pub fn policy_config(&self, wiring: &Wiring) -> PolicyConfig {
        self.policy.with_actions(wiring.action.width())
    }

    /// `out_dir`, unless the environment overrides it.
    pub fn resolved_out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.out_dir.clone(),
        }
    }
}
