use alloc::vec;
use core::f64::consts::SQRT_2;

use rand_distr::{Distribution, Normal};

use super::geometry::{dist, polyline, polyline_length, segment_hits_circle, walk, Point};
use super::scenario::{Scenario, ARENA};
use crate::error::{Error, Result};
use crate::mdp::{extract_state, Progress};
use crate::nbnc::SwarmRun;
use crate::objective::{Budget, Objective};
use crate::ppo::{Controller, Wiring};
use crate::prelude::*;
use crate::rng::{stream, StreamRng};

/// Fitness added per intersecting (segment, obstacle) pair.
pub const COLLISION_PENALTY: f64 = 10.0 * ARENA * SQRT_2;

/// An obstacle as the planner sees it: now and one frame ahead, with the
/// clearance already folded into the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hazard {
    pub now: Point,
    pub next: Point,
    pub radius: f64,
}

/// The path-planning problem of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProblem {
    pub start: Point,
    pub goal: Point,
    pub hazards: Vec<Hazard>,
}

impl PathProblem {
    pub fn from_scenario(scenario: &Scenario, vehicle: Point) -> Self {
        PathProblem {
            start: vehicle,
            goal: scenario.goal,
            hazards: scenario
                .obstacles
                .iter()
                .map(|o| Hazard {
                    now: o.center,
                    next: o.predicted(),
                    radius: o.radius + scenario.clearance,
                })
                .collect(),
        }
    }

    /// True when the segment misses every hazard now and next frame.
    pub fn chord_is_clear(&self, a: Point, b: Point) -> bool {
        self.hazards
            .iter()
            .all(|h| !segment_hits_circle(a, b, h.now, h.radius) && !segment_hits_circle(a, b, h.next, h.radius))
    }

    /// Segment-hazard pairs where the segment crosses either disc.
    pub fn intersections(&self, waypoints: &[f64]) -> usize {
        let pts = polyline(self.start, waypoints, self.goal);
        pts.windows(2)
            .map(|w| {
                self.hazards
                    .iter()
                    .filter(|h| {
                        segment_hits_circle(w[0], w[1], h.now, h.radius)
                            || segment_hits_circle(w[0], w[1], h.next, h.radius)
                    })
                    .count()
            })
            .sum()
    }
}

/// Next vehicle position on `path`.
///
/// Candidate targets are sampled every `step` of arc length. Among those with
/// a clear straight chord, the vehicle heads one step toward the one with the
/// shortest chord-plus-remaining-arc distance to the goal, which cuts out
/// loops and backtracks in the plan. Walks the path when no chord is clear.
pub fn follow(path: &[Point], step: f64, clear: impl Fn(Point, Point) -> bool) -> Point {
    let here = path[0];
    let total = polyline_length(path);
    let mut best: Option<(f64, Point)> = None;
    let mut arc = 0.0;
    while arc < total {
        arc = (arc + step).min(total);
        let target = walk(path, arc);
        if !clear(here, target) {
            continue;
        }
        let cost = dist(here, target) + (total - arc);
        // Later points win ties so the vehicle never targets its own spot.
        if best.map_or(true, |(c, _)| cost <= c) {
            best = Some((cost, target));
        }
    }
    match best {
        Some((_, target)) if dist(here, target) > 0.0 => {
            let t = (step / dist(here, target)).min(1.0);
            [here[0] + t * (target[0] - here[0]), here[1] + t * (target[1] - here[1])]
        }
        _ => walk(path, step),
    }
}

/// Polyline length plus a fixed penalty per intersection.
pub fn path_fitness(waypoints: &[f64], problem: &PathProblem) -> f64 {
    let length = polyline_length(&polyline(problem.start, waypoints, problem.goal));
    length + COLLISION_PENALTY * problem.intersections(waypoints) as f64
}

/// [`path_fitness`] over the arena box with a per-frame budget.
pub struct PathObjective {
    pub problem: PathProblem,
    lower: Vec<f64>,
    upper: Vec<f64>,
    budget: Budget,
}

impl PathObjective {
    pub fn new(problem: PathProblem, segments: usize, fe_max: usize) -> Self {
        let d = 2 * (segments - 1);
        PathObjective {
            problem,
            lower: vec![0.0; d],
            upper: vec![ARENA; d],
            budget: Budget::new(fe_max),
        }
    }
}

impl Objective for PathObjective {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.budget.charge()?;
        Ok(path_fitness(x, &self.problem))
    }

    fn fe_used(&self) -> usize {
        self.budget.used
    }

    fn fe_max(&self) -> usize {
        self.budget.max
    }
}

/// Swarm size and clustering setting of the planner.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct NavConfig {
    pub population: usize,
    pub follow_factor: f64,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig {
            population: 20,
            follow_factor: crate::nbnc::DEFAULT_FOLLOW_FACTOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Reached,
    Collided,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTrace {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub best_fitness: f64,
    pub fe_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeResult {
    pub success: bool,
    pub d_target: f64,
    pub t_step: usize,
    pub collided: bool,
    /// Largest number of evaluations spent in any frame.
    pub max_frame_fe: usize,
    pub fe_total: usize,
}

/// A vehicle crossing the arena, re-planning every frame.
pub struct Navigation<'c> {
    pub scenario: Scenario,
    pub vehicle: Point,
    pub frame: usize,
    pub status: Status,
    pub fe_total: usize,
    pub max_frame_fe: usize,
    controller: Controller<'c>,
    wiring: Wiring,
    cfg: NavConfig,
    opt: Option<SwarmRun>,
    init_rng: StreamRng,
    pso_rng: StreamRng,
    action_rng: StreamRng,
    refine_rng: StreamRng,
    obstacle_rng: StreamRng,
}

impl<'c> Navigation<'c> {
    pub fn new(scenario: &Scenario, controller: Controller<'c>, wiring: Wiring, cfg: NavConfig, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let mut nav = Navigation {
            vehicle: scenario.start,
            scenario: scenario.clone(),
            frame: 0,
            status: Status::Running,
            fe_total: 0,
            max_frame_fe: 0,
            controller,
            wiring,
            cfg,
            opt: None,
            init_rng: stream(seed, "init", 0),
            pso_rng: stream(seed, "pso", 0),
            action_rng: stream(seed, "action", 0),
            refine_rng: stream(seed, "refine", 0),
            obstacle_rng: stream(seed, "obstacles", 0),
        };
        if dist(nav.vehicle, scenario.goal) <= scenario.goal_radius {
            nav.status = Status::Reached;
        }
        Ok(nav)
    }

    /// The optimizer state carried between frames.
    pub fn swarm(&self) -> Option<&SwarmRun> {
        self.opt.as_ref()
    }

    pub fn d_target(&self) -> f64 {
        dist(self.vehicle, self.scenario.goal)
    }

    /// Plans with exactly `fe_per_frame` evaluations, moves the vehicle, then
    /// the obstacles, then checks for collision and arrival.
    pub fn step_frame(&mut self) -> Result<FrameTrace> {
        if self.status != Status::Running {
            return Err(Error::BudgetExhausted {
                fe_max: self.scenario.max_frames,
            });
        }
        let s = &self.scenario;
        let mut obj = PathObjective::new(PathProblem::from_scenario(s, self.vehicle), s.segments, s.fe_per_frame);
        let mut opt = SwarmRun::start(&mut obj, self.cfg.population, self.cfg.follow_factor, &mut self.init_rng)?;
        if let Some(prev) = self.opt.take() {
            opt.archive = prev.archive;
            opt.ratio = opt.archive.reevaluate(&mut obj)?;
        }
        let t_max = s.fe_per_frame as f64 / opt.swarm.len() as f64;
        let mut generation = 0;
        while obj.remaining() >= opt.step_cost() {
            let progress = Progress {
                fe: obj.fe_used(),
                fe_max: obj.fe_max(),
            };
            let state = extract_state(&opt.swarm, opt.ratio, progress, obj.diameter(), self.wiring.mask);
            let d = self
                .controller
                .decide(&state, &self.wiring, generation, t_max, &mut self.action_rng)?;
            opt.step(&d.hyper, &mut obj, &mut self.pso_rng)?;
            generation += 1;
        }
        let (mut best, mut best_f) = fresh_best(&opt, generation);
        // Leftover evaluations probe around the chosen path.
        let noise = Normal::new(0.0, s.step_length).expect("positive step length");
        while obj.remaining() > 0 {
            let cand: Vec<f64> = best
                .iter()
                .map(|v| (v + noise.sample(&mut self.refine_rng)).clamp(0.0, ARENA))
                .collect();
            let f = obj.evaluate(&cand)?;
            if f < best_f {
                best = cand;
                best_f = f;
            }
        }
        let fe = obj.fe_used();
        self.fe_total += fe;
        self.max_frame_fe = self.max_frame_fe.max(fe);
        self.opt = Some(opt);

        let path = polyline(self.vehicle, &best, s.goal);
        let problem = &obj.problem;
        self.vehicle = follow(&path, s.step_length, |a, b| problem.chord_is_clear(a, b));
        for o in self.scenario.obstacles.iter_mut() {
            o.advance(&mut self.obstacle_rng);
        }
        self.frame += 1;
        let s = &self.scenario;
        if s.obstacles.iter().any(|o| dist(o.center, self.vehicle) < o.radius) {
            self.status = Status::Collided;
        } else if self.d_target() <= s.goal_radius {
            self.status = Status::Reached;
        } else if self.frame >= s.max_frames {
            self.status = Status::TimedOut;
        }
        Ok(FrameTrace {
            frame: self.frame,
            x: self.vehicle[0],
            y: self.vehicle[1],
            best_fitness: best_f,
            fe_used: fe,
        })
    }

    pub fn result(&self) -> EpisodeResult {
        EpisodeResult {
            success: self.status == Status::Reached,
            d_target: self.d_target(),
            t_step: self.frame,
            collided: self.status == Status::Collided,
            max_frame_fe: self.max_frame_fe,
            fe_total: self.fe_total,
        }
    }
}

/// Best of the positions evaluated in this frame. Particle memories may be
/// stale, so only current positions and re-evaluated archive entries count.
fn fresh_best(opt: &SwarmRun, generations: usize) -> (Vec<f64>, f64) {
    let mut best = (opt.swarm.particles[0].x.clone(), f64::INFINITY);
    let archive = opt.archive.entries.iter().map(|e| (&e.position, e.f_cur));
    let particles = opt.swarm.particles.iter().map(|p| (&p.x, p.f));
    // Without a generation this frame the particles were scored last frame.
    let take = if generations > 0 { opt.swarm.len() } else { 0 };
    for (x, f) in archive.chain(particles.take(take)) {
        if f < best.1 {
            best = (x.clone(), f);
        }
    }
    best
}

/// Runs frames until arrival, collision or the frame limit.
pub fn run_episode(
    scenario: &Scenario,
    controller: Controller<'_>,
    wiring: Wiring,
    cfg: NavConfig,
    seed: u64,
) -> Result<(EpisodeResult, Vec<FrameTrace>)> {
    let mut nav = Navigation::new(scenario, controller, wiring, cfg, seed)?;
    let mut trace = Vec::new();
    while nav.status == Status::Running {
        trace.push(nav.step_frame()?);
    }
    Ok((nav.result(), trace))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NavSummary {
    pub sr: f64,
    pub mean_d_target: f64,
    pub mean_t_step: f64,
}

pub fn aggregate(results: &[EpisodeResult]) -> Result<NavSummary> {
    if results.is_empty() {
        return Err(Error::NoEpisodes);
    }
    let n = results.len() as f64;
    Ok(NavSummary {
        sr: results.iter().filter(|r| r.success).count() as f64 / n,
        mean_d_target: results.iter().map(|r| r.d_target).sum::<f64>() / n,
        mean_t_step: results.iter().map(|r| r.t_step as f64).sum::<f64>() / n,
    })
}
