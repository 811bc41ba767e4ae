//! Observation, action and reward plumbing between the swarm and the policy.

mod action;
mod reward;
mod state;

pub use action::{
    linear_decay_inertia, map_action, map_actions, ActionSpace, HyperBounds, FIXED_ACCELERATION,
};
pub use reward::{reward, RewardInputs, RewardKind, REWARD_EPSILON};
pub use state::{extract_state, FeatureMask, Progress, StateMatrix, FEATURE_EPSILON, N_FEATURES};
