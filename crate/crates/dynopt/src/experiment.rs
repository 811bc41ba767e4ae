//! Training, evaluation, ablation and navigation runs. Independent runs fan
//! out over rayon; results come back in job order so output files are
//! identical for any thread count.

use dynopt_core::bench::{make_suite_with, DynamicInstance, Suite};
use dynopt_core::navsim::{aggregate, run_episode as nav_episode, EpisodeResult, FrameTrace, Scenario};
use dynopt_core::policy::PolicyParams;
use dynopt_core::ppo::{
    apply_ablation, evaluate_controller, meta_train_with, Controller, CurvePoint, TrainOutcome, Variant, Wiring,
    FIXED_BASELINE,
};
use dynopt_core::rng::{derive_seed, stream};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::Result;
use crate::records::{NavRow, NavSummaryRow, ResultRow};

/// Name of the fixed-coefficient baseline on the command line and in tables.
pub const FIXED_PSO: &str = "fixed-pso";

/// A named controller with its wiring.
#[derive(Clone, Copy)]
pub struct Contender<'a> {
    pub name: &'a str,
    pub controller: Controller<'a>,
    pub wiring: Wiring,
}

impl<'a> Contender<'a> {
    pub fn fixed() -> Self {
        Contender {
            name: FIXED_PSO,
            controller: Controller::Fixed(FIXED_BASELINE),
            wiring: Wiring::default(),
        }
    }

    /// Evaluation acts with the policy means.
    pub fn policy(name: &'a str, params: &'a PolicyParams<f32>, wiring: Wiring) -> Self {
        Contender {
            name,
            controller: Controller::Policy { params, greedy: true },
            wiring,
        }
    }
}

pub fn suite_for(cfg: &RunConfig) -> Suite {
    make_suite_with(&cfg.suite, cfg.seed)
}

/// Seed of evaluation run `run`; shared by all algorithms so they face the
/// same noise and random-search reference.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, "eval", run as u64)
}

pub fn train(
    cfg: &RunConfig,
    instances: &[DynamicInstance],
    wiring: Wiring,
    seed: u64,
    on_episode: impl FnMut(&CurvePoint),
) -> Result<TrainOutcome> {
    let params = PolicyParams::init(cfg.policy_config(&wiring), &mut stream(seed, "init", 0))?;
    Ok(meta_train_with(params, instances, &cfg.train, wiring, seed, on_episode)?)
}

/// `cfg.runs` runs of `who` on every instance, rows in (instance, run) order.
/// Ranks are left at zero.
pub fn evaluate(who: &Contender<'_>, instances: &[DynamicInstance], cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let jobs: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..cfg.runs).map(move |r| (i, r))).collect();
    jobs.par_iter()
        .map(|&(i, run)| {
            let seed = run_seed(cfg.seed, run);
            let inst = &instances[i];
            let res = evaluate_controller(&who.controller, inst, &cfg.train, who.wiring, seed)?;
            Ok(ResultRow {
                instance_id: inst.id.clone(),
                algorithm: who.name.to_string(),
                run,
                seed,
                e_off: res.e_off,
                e_rand: res.e_rand,
                rp: res.rp,
                rank: 0,
            })
        })
        .collect()
}

pub struct VariantRun {
    pub variant: Variant,
    pub outcome: TrainOutcome,
    pub rows: Vec<ResultRow>,
}

/// Trains and evaluates each variant with the same seed; only the wiring
/// differs between them.
pub fn ablate(cfg: &RunConfig, suite: &Suite, variants: &[Variant], mut progress: impl FnMut(Variant, &CurvePoint)) -> Result<Vec<VariantRun>> {
    let mut out = Vec::with_capacity(variants.len());
    for &v in variants {
        let wiring = apply_ablation(&v.flags(), cfg.bounds)?;
        let outcome = train(cfg, &suite.train, wiring, cfg.seed, |p| progress(v, p))?;
        let rows = evaluate(&Contender::policy(v.name(), &outcome.params, wiring), &suite.test, cfg)?;
        out.push(VariantRun {
            variant: v,
            outcome,
            rows,
        });
    }
    Ok(out)
}

pub fn scenario_for(cfg: &RunConfig, case: u8) -> Result<Scenario> {
    Ok(Scenario::case(case, cfg.seed)?)
}

pub struct NavEpisode {
    pub row: NavRow,
    pub result: EpisodeResult,
    pub trace: Vec<FrameTrace>,
}

/// `cfg.episodes` episodes on each scenario, in (scenario, episode) order.
pub fn navigate(who: &Contender<'_>, scenarios: &[Scenario], cfg: &RunConfig) -> Result<Vec<NavEpisode>> {
    let jobs: Vec<(usize, usize)> = (0..scenarios.len()).flat_map(|s| (0..cfg.episodes).map(move |e| (s, e))).collect();
    jobs.par_iter()
        .map(|&(s, e)| {
            let sc = &scenarios[s];
            let seed = derive_seed(cfg.seed, "navigate", ((sc.case_id as u64) << 32) | e as u64);
            let (result, trace) = nav_episode(sc, who.controller, who.wiring, cfg.nav, seed)?;
            Ok(NavEpisode {
                row: NavRow::new(who.name, sc.case_id, e, seed, &result),
                result,
                trace,
            })
        })
        .collect()
}

/// Success rate and mean distance/steps per (algorithm, case), in first-seen
/// order.
pub fn summarize_navigation(episodes: &[NavEpisode]) -> Result<Vec<NavSummaryRow>> {
    let mut keys: Vec<(String, u8)> = Vec::new();
    for e in episodes {
        let k = (e.row.algorithm.clone(), e.row.case);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(algorithm, case)| {
            let results: Vec<EpisodeResult> = episodes
                .iter()
                .filter(|e| e.row.algorithm == algorithm && e.row.case == case)
                .map(|e| e.result)
                .collect();
            let s = aggregate(&results)?;
            Ok(NavSummaryRow {
                algorithm,
                case,
                episodes: results.len(),
                sr: s.sr,
                mean_d_target: s.mean_d_target,
                mean_t_step: s.mean_t_step,
            })
        })
        .collect()
}
