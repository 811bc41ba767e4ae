use crate::error::{Error, Result};
use crate::mdp::{ActionSpace, FeatureMask, HyperBounds, RewardKind};
use crate::nbnc::DEFAULT_FOLLOW_FACTOR;

/// Meta-training settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TrainConfig {
    /// Steps between updates.
    pub n_rollout: usize,
    /// Gradient steps per update.
    pub k_epochs: usize,
    pub lr: f64,
    /// Passes over the training instances.
    pub epochs: usize,
    /// Instances rolled out in lockstep.
    pub batch: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub clip: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub population: usize,
    pub follow_factor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_rollout: 10,
            k_epochs: 3,
            lr: 1e-5,
            epochs: 20,
            batch: 8,
            gamma: 0.99,
            lambda: 0.95,
            clip: 0.2,
            entropy_coef: 0.01,
            value_coef: 0.5,
            population: 50,
            follow_factor: DEFAULT_FOLLOW_FACTOR,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [self.n_rollout, self.k_epochs, self.epochs, self.batch];
        if counts.contains(&0) {
            return Err(Error::Config("training counts must be positive"));
        }
        if self.population < 2 {
            return Err(Error::Config("population needs at least two particles"));
        }
        let reals = [
            self.lr,
            self.gamma,
            self.lambda,
            self.clip,
            self.entropy_coef,
            self.value_coef,
            self.follow_factor,
        ];
        if reals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("training coefficients must be positive"));
        }
        if self.clip >= 1.0 || self.gamma > 1.0 || self.lambda > 1.0 {
            return Err(Error::Config("clip must be below 1; gamma and lambda at most 1"));
        }
        Ok(())
    }
}

/// How the controller is wired to the optimizer: which features it sees,
/// which coefficients it sets, and how it is rewarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wiring {
    pub mask: FeatureMask,
    pub action: ActionSpace,
    pub reward: RewardKind,
    pub bounds: HyperBounds,
}

impl Default for Wiring {
    fn default() -> Self {
        Self {
            mask: FeatureMask::NONE,
            action: ActionSpace::Full,
            reward: RewardKind::LogScale,
            bounds: HyperBounds::default(),
        }
    }
}

/// Component switches for the degraded variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AblationFlags {
    pub no_subpop: bool,
    pub no_archive_feature: bool,
    pub action_c_only: bool,
    pub action_w_only: bool,
    pub binary_reward: bool,
    pub linear_reward: bool,
}

pub fn apply_ablation(flags: &AblationFlags, bounds: HyperBounds) -> Result<Wiring> {
    if flags.action_c_only && flags.action_w_only {
        return Err(Error::Config("action_c_only and action_w_only are exclusive"));
    }
    if flags.binary_reward && flags.linear_reward {
        return Err(Error::Config("binary_reward and linear_reward are exclusive"));
    }
    bounds.validate()?;
    let mut mask = FeatureMask::NONE;
    if flags.no_subpop {
        mask = mask.without_species();
    }
    if flags.no_archive_feature {
        mask = mask.without_drift();
    }
    let action = if flags.action_c_only {
        ActionSpace::Acceleration
    } else if flags.action_w_only {
        ActionSpace::Inertia
    } else {
        ActionSpace::Full
    };
    let reward = if flags.binary_reward {
        RewardKind::Binary
    } else if flags.linear_reward {
        RewardKind::Linear
    } else {
        RewardKind::LogScale
    };
    Ok(Wiring {
        mask,
        action,
        reward,
        bounds,
    })
}

/// The full system and its six single-component variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Full,
    NoSubpop,
    NoArchiveFeature,
    ActionC,
    ActionW,
    BinaryReward,
    LinearReward,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Full,
        Variant::NoSubpop,
        Variant::NoArchiveFeature,
        Variant::ActionC,
        Variant::ActionW,
        Variant::BinaryReward,
        Variant::LinearReward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoSubpop => "no_subpop",
            Variant::NoArchiveFeature => "no_archive_feature",
            Variant::ActionC => "action_c",
            Variant::ActionW => "action_w",
            Variant::BinaryReward => "binary_reward",
            Variant::LinearReward => "linear_reward",
        }
    }

    pub fn from_name(name: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn flags(self) -> AblationFlags {
        let mut f = AblationFlags::default();
        match self {
            Variant::Full => {}
            Variant::NoSubpop => f.no_subpop = true,
            Variant::NoArchiveFeature => f.no_archive_feature = true,
            Variant::ActionC => f.action_c_only = true,
            Variant::ActionW => f.action_w_only = true,
            Variant::BinaryReward => f.binary_reward = true,
            Variant::LinearReward => f.linear_reward = true,
        }
        f
    }

    pub fn wiring(self) -> Wiring {
        apply_ablation(&self.flags(), HyperBounds::default()).expect("single flag is consistent")
    }
}
