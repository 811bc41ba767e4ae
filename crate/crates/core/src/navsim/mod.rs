//! Path planning among moving circular obstacles, posed as one dynamic
//! optimization problem per control frame.
//!
//! Each frame the swarm searches `segments - 1` waypoints between the vehicle
//! and the goal. A path is scored by its length plus a penalty for every
//! segment that crosses an obstacle at its current or next-frame position.
//! Each frame starts a fresh swarm, but the elite archive carries the best
//! recent paths across frames. Re-scoring it under the new frame gives the
//! drift ratio the controller observes and seeds the swarm with the old plan.

mod episode;
mod geometry;
mod scenario;

pub use episode::{
    aggregate, follow, path_fitness, run_episode, EpisodeResult, FrameTrace, Hazard, NavConfig, NavSummary, Navigation,
    PathObjective, PathProblem, Status, COLLISION_PENALTY,
};
pub use geometry::{dist, polyline, polyline_length, segment_distance, segment_hits_circle, walk, Point};
pub use scenario::{Motion, Obstacle, Scenario, ARENA};
