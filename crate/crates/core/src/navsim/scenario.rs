use core::f64::consts::TAU;

use rand::Rng;

use super::geometry::{dist, Point};
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::rng::{stream, StreamRng};

/// Side length of the square arena.
pub const ARENA: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Motion {
    Consistent,
    /// Keeps its speed but picks a fresh heading every frame.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
    /// Displacement per frame.
    pub velocity: Point,
    pub motion: Motion,
}

impl Obstacle {
    /// Moves one frame with elastic reflection at the walls. Random obstacles
    /// re-draw their heading from `rng` first.
    pub fn advance(&mut self, rng: &mut StreamRng) {
        if self.motion == Motion::Random {
            let speed = dist(self.velocity, [0.0, 0.0]);
            let theta = rng.random_range(0.0..TAU);
            self.velocity = [speed * theta.cos(), speed * theta.sin()];
        }
        self.drift();
    }

    /// Where the obstacle will be next frame if it keeps its velocity.
    pub fn predicted(&self) -> Point {
        let mut o = self.clone();
        o.drift();
        o.center
    }

    fn drift(&mut self) {
        for k in 0..2 {
            let mut c = self.center[k] + self.velocity[k];
            if c < 0.0 {
                c = -c;
                self.velocity[k] = -self.velocity[k];
            } else if c > ARENA {
                c = 2.0 * ARENA - c;
                self.velocity[k] = -self.velocity[k];
            }
            self.center[k] = c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub case_id: u8,
    pub start: Point,
    pub goal: Point,
    pub goal_radius: f64,
    /// Path segments; the genome holds `segments - 1` free waypoints.
    pub segments: usize,
    pub obstacles: Vec<Obstacle>,
    pub max_frames: usize,
    pub fe_per_frame: usize,
    /// Distance the vehicle travels per frame.
    pub step_length: f64,
    /// Margin added to every obstacle radius when scoring paths.
    pub clearance: f64,
}

const OBSTACLES: usize = 8;
const RADIUS: (f64, f64) = (15.0, 35.0);
const SPEED: (f64, f64) = (1.0, 4.0);
/// Free space kept around start and goal when placing obstacles.
const KEEP_OUT: f64 = 60.0;

impl Scenario {
    /// Case 1–3: consistent obstacles with 4, 6, 10 segments; case 4–6 the
    /// same with random headings. The layout is drawn from `seed`.
    pub fn case(case_id: u8, seed: u64) -> Result<Self> {
        let (motion, segments) = match case_id {
            1 => (Motion::Consistent, 4),
            2 => (Motion::Consistent, 6),
            3 => (Motion::Consistent, 10),
            4 => (Motion::Random, 4),
            5 => (Motion::Random, 6),
            6 => (Motion::Random, 10),
            _ => return Err(Error::Config("navigation case must be 1-6")),
        };
        let start = [40.0, 40.0];
        let goal = [460.0, 460.0];
        let mut rng = stream(seed, "layout", case_id as u64);
        let mut obstacles = Vec::with_capacity(OBSTACLES);
        while obstacles.len() < OBSTACLES {
            let radius = rng.random_range(RADIUS.0..RADIUS.1);
            let center = [rng.random_range(0.0..ARENA), rng.random_range(0.0..ARENA)];
            if dist(center, start) < radius + KEEP_OUT || dist(center, goal) < radius + KEEP_OUT {
                continue;
            }
            let speed = rng.random_range(SPEED.0..SPEED.1);
            let theta = rng.random_range(0.0..TAU);
            obstacles.push(Obstacle {
                center,
                radius,
                velocity: [speed * theta.cos(), speed * theta.sin()],
                motion,
            });
        }
        let s = Scenario {
            case_id,
            start,
            goal,
            goal_radius: 15.0,
            segments,
            obstacles,
            max_frames: 500,
            fe_per_frame: 1000,
            step_length: 10.0,
            clearance: 4.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        2 * (self.segments - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments < 2 {
            return Err(Error::Config("need at least two segments"));
        }
        if self.max_frames == 0 || self.fe_per_frame == 0 {
            return Err(Error::Config("frame and evaluation budgets must be positive"));
        }
        if !(self.goal_radius > 0.0 && self.step_length > 0.0 && self.clearance >= 0.0) {
            return Err(Error::Config("goal radius and step length must be positive"));
        }
        let inside = |p: Point| p.iter().all(|v| (0.0..=ARENA).contains(v));
        if !inside(self.start) || !inside(self.goal) {
            return Err(Error::Config("start and goal must lie in the arena"));
        }
        for o in &self.obstacles {
            if !(o.radius > 0.0) || !inside(o.center) {
                return Err(Error::Config("obstacle must have positive radius and lie in the arena"));
            }
            if dist(o.center, self.start) < o.radius || dist(o.center, self.goal) < o.radius {
                return Err(Error::Config("start and goal must be outside every obstacle"));
            }
        }
        Ok(())
    }
}
