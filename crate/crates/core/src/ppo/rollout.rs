use crate::bench::{normalized_performance, offline_error, random_baseline, DynamicInstance, DynamicRun};
use crate::error::{Error, Result};
use crate::mdp::{extract_state, Progress, RewardInputs, StateMatrix, N_FEATURES};
use crate::nbnc::SwarmRun;
use crate::objective::Objective;
use crate::policy::PolicyParams;
use crate::prelude::*;
use crate::rng::{stream, StreamRng};

use super::buffer::{RolloutBuffer, Transition};
use super::config::{TrainConfig, Wiring};
use super::controller::Controller;

/// Per-generation record of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub step: usize,
    pub fe: usize,
    pub gbest_f: f64,
    pub ratio: f64,
    pub reward: f64,
    pub species: usize,
    pub reinjected: usize,
    /// Population means of `(w, c1, c2)` applied this generation.
    pub mean_hyper: [f64; 3],
    /// Largest magnitude of each feature in the observed state.
    pub feature_abs_max: [f64; N_FEATURES],
}

/// One optimizer run on one instance, advanced a generation at a time.
pub struct Episode<'i> {
    pub run: DynamicRun<'i>,
    pub opt: SwarmRun,
    pub state: StateMatrix,
    pub done: bool,
    pub steps: usize,
    /// Sum of rewards so far.
    pub ret: f64,
    wiring: Wiring,
    pso_rng: StreamRng,
    action_rng: StreamRng,
}

impl<'i> Episode<'i> {
    /// Named sub-streams of `seed` drive initialization, PSO moves, action
    /// sampling and observation noise.
    pub fn start(instance: &'i DynamicInstance, cfg: &TrainConfig, wiring: Wiring, seed: u64) -> Result<Self> {
        let mut run = instance.run(stream(seed, "noise", 0));
        let opt = SwarmRun::start(&mut run, cfg.population, cfg.follow_factor, &mut stream(seed, "init", 0))?;
        let mut ep = Episode {
            run,
            opt,
            state: StateMatrix { rows: Vec::new() },
            done: false,
            steps: 0,
            ret: 0.0,
            wiring,
            pso_rng: stream(seed, "pso", 0),
            action_rng: stream(seed, "action", 0),
        };
        ep.state = ep.observe();
        ep.done = ep.run.remaining() < ep.opt.step_cost();
        Ok(ep)
    }

    fn observe(&self) -> StateMatrix {
        let progress = Progress {
            fe: self.run.fe_used(),
            fe_max: self.run.fe_max(),
        };
        extract_state(&self.opt.swarm, self.opt.ratio, progress, self.run.diameter(), self.wiring.mask)
    }

    /// Generations available over the whole budget.
    pub fn t_max(&self) -> f64 {
        self.run.fe_max() as f64 / self.opt.swarm.len() as f64
    }

    /// Observe, act, advance one generation, score it, and store the
    /// transition when a buffer is given.
    pub fn rollout_step(&mut self, controller: &Controller<'_>, buffer: Option<&mut RolloutBuffer>) -> Result<StepTrace> {
        if self.done {
            return Err(Error::BudgetExhausted {
                fe_max: self.run.fe_max(),
            });
        }
        let t_max = self.t_max();
        let decision = controller.decide(&self.state, &self.wiring, self.opt.swarm.generation, t_max, &mut self.action_rng)?;
        let report = self.opt.step(&decision.hyper, &mut self.run, &mut self.pso_rng)?;
        let reward = self
            .wiring
            .reward
            .compute(&RewardInputs::new(report.ratio, report.gbest_prev_f, report.gbest_f));
        let next = self.observe();
        self.done = self.run.remaining() < self.opt.step_cost();
        self.steps += 1;
        self.ret += reward;

        let n = decision.hyper.len() as f64;
        let mut mean_hyper = [0.0; 3];
        for h in &decision.hyper.0 {
            mean_hyper[0] += h.w / n;
            mean_hyper[1] += h.c1 / n;
            mean_hyper[2] += h.c2 / n;
        }
        let mut feature_abs_max = [0.0f64; N_FEATURES];
        for row in &self.state.rows {
            for (m, v) in feature_abs_max.iter_mut().zip(row) {
                *m = m.max(v.abs());
            }
        }
        let state = core::mem::replace(&mut self.state, next);
        if let (Some(buf), Some(action)) = (buffer, decision.sample) {
            buf.push(Transition {
                state,
                action,
                logp: decision.logp,
                reward,
                value: decision.value,
                done: self.done,
            });
        }
        Ok(StepTrace {
            step: self.steps,
            fe: self.run.fe_used(),
            gbest_f: report.gbest_f,
            ratio: report.ratio,
            reward,
            species: report.species,
            reinjected: report.reinjected,
            mean_hyper,
            feature_abs_max,
        })
    }

    pub fn offline_error(&self) -> Result<f64> {
        offline_error(&self.run.ledger)
    }
}

/// Result of a finished episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub e_off: f64,
    pub ret: f64,
    pub steps: usize,
    pub fe_used: usize,
    pub trace: Vec<StepTrace>,
}

/// Runs an episode to the end of the budget without learning.
pub fn run_episode(
    controller: &Controller<'_>,
    instance: &DynamicInstance,
    cfg: &TrainConfig,
    wiring: Wiring,
    seed: u64,
) -> Result<EpisodeSummary> {
    let mut ep = Episode::start(instance, cfg, wiring, seed)?;
    let mut trace = Vec::new();
    while !ep.done {
        trace.push(ep.rollout_step(controller, None)?);
    }
    Ok(EpisodeSummary {
        e_off: ep.offline_error()?,
        ret: ep.ret,
        steps: ep.steps,
        fe_used: ep.run.fe_used(),
        trace,
    })
}

/// Offline error, random-search error and their ratio for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub e_off: f64,
    pub e_rand: f64,
    pub rp: f64,
    pub trace: Vec<StepTrace>,
}

pub fn evaluate_controller(
    controller: &Controller<'_>,
    instance: &DynamicInstance,
    cfg: &TrainConfig,
    wiring: Wiring,
    seed: u64,
) -> Result<EvalResult> {
    let ep = run_episode(controller, instance, cfg, wiring, seed)?;
    let e_rand = random_baseline(instance, seed);
    Ok(EvalResult {
        e_off: ep.e_off,
        e_rand,
        rp: normalized_performance(ep.e_off, e_rand)?,
        trace: ep.trace,
    })
}

/// Greedy (mean-action) evaluation of a policy.
pub fn evaluate_policy(
    params: &PolicyParams<f32>,
    instance: &DynamicInstance,
    cfg: &TrainConfig,
    wiring: Wiring,
    seed: u64,
) -> Result<EvalResult> {
    evaluate_controller(&Controller::Policy { params, greedy: true }, instance, cfg, wiring, seed)
}
