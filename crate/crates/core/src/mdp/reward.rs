//! Drift-aligned reward.
//!
//! The previous global best is scaled by the archive's drift ratio to estimate
//! where the optimizer would stand had it made no progress; the reward is the
//! log10 improvement over that baseline, normalized by the largest
//! improvement still possible.

#[allow(unused_imports)]
use crate::prelude::*;

pub const REWARD_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardInputs {
    pub ratio: f64,
    pub gbest_prev_f: f64,
    pub gbest_cur_f: f64,
    pub epsilon: f64,
}

impl RewardInputs {
    pub fn new(ratio: f64, gbest_prev_f: f64, gbest_cur_f: f64) -> Self {
        Self {
            ratio,
            gbest_prev_f,
            gbest_cur_f,
            epsilon: REWARD_EPSILON,
        }
    }

    /// Previous best carried into the current environment.
    pub fn baseline(&self) -> f64 {
        self.ratio * self.gbest_prev_f
    }
}

/// Log-scale reward in `[0, 1]` whenever `|gbest_cur_f| >= epsilon`.
pub fn reward(input: &RewardInputs) -> f64 {
    let eps = input.epsilon;
    let base = input.baseline().abs().max(eps).log10();
    let cur = input.gbest_cur_f.abs().max(eps).log10();
    let delta = base - cur;
    let r = delta.max(0.0) / (base - eps.log10() + eps);
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// Reward shaping variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RewardKind {
    #[default]
    LogScale,
    /// 1 when the best beats the drift baseline, else 0.
    Binary,
    /// Unscaled improvement over the drift baseline.
    Linear,
}

impl RewardKind {
    pub fn compute(self, input: &RewardInputs) -> f64 {
        match self {
            RewardKind::LogScale => reward(input),
            RewardKind::Binary => {
                if input.gbest_cur_f < input.baseline() {
                    1.0
                } else {
                    0.0
                }
            }
            RewardKind::Linear => (input.baseline() - input.gbest_cur_f).max(0.0),
        }
    }
}
