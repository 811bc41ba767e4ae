//! Meta-training of the controller with proximal policy optimization.

mod buffer;
mod config;
mod controller;
mod rollout;
mod train;
mod update;

pub use buffer::{compute_advantages, normalize_advantages, RolloutBuffer, Transition};
pub use config::{apply_ablation, AblationFlags, TrainConfig, Variant, Wiring};
pub use controller::{Controller, Decision, FIXED_BASELINE};
pub use rollout::{evaluate_controller, evaluate_policy, run_episode, Episode, EpisodeSummary, EvalResult, StepTrace};
pub use train::{meta_train, meta_train_with, CurvePoint, TrainOutcome};
pub use update::{ppo_loss, ppo_update, LossParts, PpoBatch, UpdateStats};
