use alloc::vec;

use crate::mdp::StateMatrix;
use crate::prelude::*;

/// One step of experience.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: StateMatrix,
    /// Pre-clip Gaussian sample, row-major; the optimizer received its clip
    /// to `[0, 1]`.
    pub action: Vec<f64>,
    pub logp: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
}

/// Transitions collected since the last update.
#[derive(Debug, Clone, Default)]
pub struct RolloutBuffer {
    pub transitions: Vec<Transition>,
}

impl RolloutBuffer {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    pub fn clear(&mut self) {
        self.transitions.clear();
    }

    pub fn last_done(&self) -> bool {
        self.transitions.last().is_some_and(|t| t.done)
    }
}

/// Generalized advantage estimates and value targets. `bootstrap` is the
/// value of the state after the last transition; `done` cuts the recursion.
pub fn compute_advantages(transitions: &[Transition], gamma: f64, lambda: f64, bootstrap: f64) -> (Vec<f64>, Vec<f64>) {
    let n = transitions.len();
    let mut adv = vec![0.0; n];
    let mut gae = 0.0;
    for t in (0..n).rev() {
        let tr = &transitions[t];
        let next_value = if t + 1 < n { transitions[t + 1].value } else { bootstrap };
        let (next_value, carry) = if tr.done { (0.0, 0.0) } else { (next_value, gae) };
        let delta = tr.reward + gamma * next_value - tr.value;
        gae = delta + gamma * lambda * carry;
        adv[t] = gae;
    }
    let returns = adv.iter().zip(transitions).map(|(a, t)| a + t.value).collect();
    (adv, returns)
}

/// Zero mean, unit variance; left alone for a single sample.
pub fn normalize_advantages(adv: &mut [f64]) {
    if adv.len() < 2 {
        return;
    }
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let std = (adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
    for a in adv.iter_mut() {
        *a = (*a - mean) / (std + 1e-8);
    }
}
