use alloc::string::String;

use rand::seq::SliceRandom;

use crate::bench::DynamicInstance;
use crate::error::Result;
use crate::policy::{forward, Adam, PolicyParams};
use crate::prelude::*;
use crate::rng::{derive_seed, stream};

use super::buffer::RolloutBuffer;
use super::config::{TrainConfig, Wiring};
use super::controller::Controller;
use super::rollout::Episode;
use super::update::{ppo_update, UpdateStats};

/// Learning-curve entry: one episode of one training instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub epoch: usize,
    pub instance_id: String,
    pub ret: f64,
    pub e_off: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: PolicyParams<f32>,
    pub curve: Vec<CurvePoint>,
    pub updates: usize,
    pub aborted_updates: usize,
}

pub fn meta_train(
    params: PolicyParams<f32>,
    instances: &[DynamicInstance],
    cfg: &TrainConfig,
    wiring: Wiring,
    seed: u64,
) -> Result<TrainOutcome> {
    meta_train_with(params, instances, cfg, wiring, seed, |_| {})
}

/// Meta-training. Each epoch shuffles the instances and walks them in
/// batches. The episodes of a batch advance in lockstep: every live episode
/// collects up to `n_rollout` steps with the current parameters, then one
/// update per episode is applied in batch order. An episode that ends
/// triggers an update on whatever it collected.
pub fn meta_train_with(
    mut params: PolicyParams<f32>,
    instances: &[DynamicInstance],
    cfg: &TrainConfig,
    wiring: Wiring,
    seed: u64,
    mut on_episode: impl FnMut(&CurvePoint),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let mut adam = Adam::new(cfg.lr, params.len());
    let mut curve = Vec::with_capacity(cfg.epochs * instances.len());
    let mut updates = 0;
    let mut aborted_updates = 0;
    let mut order: Vec<usize> = (0..instances.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut stream(seed, "shuffle", epoch as u64));
        for chunk in order.chunks(cfg.batch) {
            let mut live: Vec<(Episode<'_>, RolloutBuffer)> = Vec::with_capacity(chunk.len());
            for &i in chunk {
                let ep_seed = derive_seed(seed, "episode", (epoch * instances.len() + i) as u64);
                live.push((Episode::start(&instances[i], cfg, wiring, ep_seed)?, RolloutBuffer::default()));
            }
            while live.iter().any(|(ep, buf)| !ep.done || !buf.is_empty()) {
                for (ep, buf) in live.iter_mut() {
                    let controller = Controller::Policy {
                        params: &params,
                        greedy: false,
                    };
                    while !ep.done && buf.len() < cfg.n_rollout {
                        ep.rollout_step(&controller, Some(buf))?;
                    }
                }
                for (ep, buf) in live.iter_mut() {
                    if buf.is_empty() {
                        continue;
                    }
                    let bootstrap = if buf.last_done() { 0.0 } else { forward(&params, &ep.state)?.1 };
                    let stats: UpdateStats = ppo_update(&mut params, &mut adam, buf, bootstrap, cfg)?;
                    updates += 1;
                    aborted_updates += stats.aborted as usize;
                }
            }
            for (k, (ep, _)) in live.iter().enumerate() {
                let point = CurvePoint {
                    epoch,
                    instance_id: instances[chunk[k]].id.clone(),
                    ret: ep.ret,
                    e_off: ep.offline_error()?,
                };
                on_episode(&point);
                curve.push(point);
            }
        }
    }
    Ok(TrainOutcome {
        params,
        curve,
        updates,
        aborted_updates,
    })
}
