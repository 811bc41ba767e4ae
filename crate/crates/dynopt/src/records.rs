//! CSV row types.

use dynopt_core::navsim::{EpisodeResult, FrameTrace};
use dynopt_core::ppo::CurvePoint;
use serde::{Deserialize, Serialize};

/// One evaluation run of one algorithm on one test instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub e_off: f64,
    pub e_rand: f64,
    /// `e_off / e_rand`.
    pub rp: f64,
    /// Rank of the algorithm's mean rp on this instance.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub epoch: usize,
    pub instance_id: String,
    #[serde(rename = "return")]
    pub ret: f64,
    pub e_off: f64,
}

impl From<&CurvePoint> for CurveRow {
    fn from(p: &CurvePoint) -> Self {
        CurveRow {
            epoch: p.epoch,
            instance_id: p.instance_id.clone(),
            ret: p.ret,
            e_off: p.e_off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavRow {
    pub algorithm: String,
    pub case: u8,
    pub episode: usize,
    pub seed: u64,
    pub success: bool,
    pub collided: bool,
    pub d_target: f64,
    pub t_step: usize,
    pub fe_total: usize,
    pub max_frame_fe: usize,
}

impl NavRow {
    pub fn new(algorithm: &str, case: u8, episode: usize, seed: u64, r: &EpisodeResult) -> Self {
        NavRow {
            algorithm: algorithm.to_string(),
            case,
            episode,
            seed,
            success: r.success,
            collided: r.collided,
            d_target: r.d_target,
            t_step: r.t_step,
            fe_total: r.fe_total,
            max_frame_fe: r.max_frame_fe,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavSummaryRow {
    pub algorithm: String,
    pub case: u8,
    pub episodes: usize,
    pub sr: f64,
    pub mean_d_target: f64,
    pub mean_t_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub best_fitness: f64,
    pub fe_used: usize,
}

impl From<&FrameTrace> for FrameRow {
    fn from(t: &FrameTrace) -> Self {
        FrameRow {
            frame: t.frame,
            x: t.x,
            y: t.y,
            best_fitness: t.best_fitness,
            fe_used: t.fe_used,
        }
    }
}
