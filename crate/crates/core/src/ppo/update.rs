use alloc::vec;

use super::buffer::{compute_advantages, normalize_advantages, RolloutBuffer};
use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::mdp::StateMatrix;
use crate::policy::{backward, forward_batch, Adam, PolicyParams, Real};
use crate::prelude::*;

/// Inputs of the clipped-surrogate loss for one update.
#[derive(Debug, Clone)]
pub struct PpoBatch<'a> {
    pub states: Vec<&'a StateMatrix>,
    pub actions: Vec<&'a [f64]>,
    pub logp_old: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

/// Loss components of one gradient step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    /// Fraction of steps where the clipped branch was selected.
    pub clip_fraction: f64,
    /// Largest `|ratio - 1|` in the batch.
    pub max_ratio_dev: f64,
}

/// Diagnostics of one update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateStats {
    pub epochs: Vec<LossParts>,
    /// Set when a non-finite loss stopped the update early.
    pub aborted: bool,
}

/// Log-ratios beyond this are clamped before exponentiation.
const MAX_LOG_RATIO: f64 = 20.0;

/// `-mean(min(rho A, clip(rho) A)) + c_v mean((V - R)^2) - c_e mean(H)` and
/// its gradient.
pub fn ppo_loss<T: Real>(params: &PolicyParams<T>, batch: &PpoBatch<'_>, cfg: &TrainConfig) -> Result<(LossParts, Vec<T>)> {
    let n = batch.states.len();
    let (out, cache) = forward_batch(params, &batch.states)?;
    let per = out.heads[0].mu.len();
    let inv = 1.0 / n as f64;
    let mut d_mu = vec![0.0; n * per];
    let mut d_sigma = vec![0.0; n * per];
    let mut d_value = vec![0.0; n];
    let mut parts = LossParts::default();
    let mut clipped_steps = 0usize;
    for t in 0..n {
        let head = &out.heads[t];
        let a = batch.actions[t];
        if a.len() != per {
            return Err(Error::Shape {
                expected: per,
                got: a.len(),
            });
        }
        let (logp, entropy) = head.log_prob_and_entropy(a);
        let ratio = (logp - batch.logp_old[t]).clamp(-MAX_LOG_RATIO, MAX_LOG_RATIO).exp();
        let adv = batch.advantages[t];
        let unclipped = ratio * adv;
        let clipped = ratio.clamp(1.0 - cfg.clip, 1.0 + cfg.clip) * adv;
        parts.max_ratio_dev = parts.max_ratio_dev.max((ratio - 1.0).abs());
        let r = t * per..(t + 1) * per;
        if unclipped <= clipped {
            parts.policy -= unclipped * inv;
            head.log_prob_grad(a, -adv * ratio * inv, &mut d_mu[r.clone()], &mut d_sigma[r.clone()]);
        } else {
            parts.policy -= clipped * inv;
            clipped_steps += 1;
        }
        parts.entropy += entropy * inv;
        head.entropy_grad(-cfg.entropy_coef * inv, &mut d_sigma[r]);
        let err = out.values[t] - batch.returns[t];
        parts.value += err * err * inv;
        d_value[t] = 2.0 * cfg.value_coef * err * inv;
    }
    parts.total = parts.policy + cfg.value_coef * parts.value - cfg.entropy_coef * parts.entropy;
    parts.clip_fraction = clipped_steps as f64 * inv;
    let grad = backward(params, &cache, &d_mu, &d_sigma, &d_value)?;
    Ok((parts, grad))
}

/// Runs `k_epochs` Adam steps on the buffered experience, then clears it.
/// `bootstrap` is the critic's value of the state after the last transition.
pub fn ppo_update(
    params: &mut PolicyParams<f32>,
    adam: &mut Adam,
    buffer: &mut RolloutBuffer,
    bootstrap: f64,
    cfg: &TrainConfig,
) -> Result<UpdateStats> {
    if buffer.is_empty() {
        return Ok(UpdateStats::default());
    }
    let trs = &buffer.transitions;
    let (mut advantages, returns) = compute_advantages(trs, cfg.gamma, cfg.lambda, bootstrap);
    normalize_advantages(&mut advantages);
    let batch = PpoBatch {
        states: trs.iter().map(|t| &t.state).collect(),
        actions: trs.iter().map(|t| t.action.as_slice()).collect(),
        logp_old: trs.iter().map(|t| t.logp).collect(),
        advantages,
        returns,
    };
    let mut stats = UpdateStats::default();
    for _ in 0..cfg.k_epochs {
        let (parts, grad) = ppo_loss(params, &batch, cfg)?;
        stats.epochs.push(parts);
        if !parts.total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            stats.aborted = true;
            break;
        }
        adam.step(params, &grad)?;
    }
    buffer.clear();
    Ok(stats)
}
