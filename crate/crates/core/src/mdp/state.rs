//! Per-particle observation features.

use crate::nbnc::{distance, Swarm};
use crate::prelude::*;
use alloc::vec;

pub const N_FEATURES: usize = 10;

/// Guard added to standard deviations.
pub const FEATURE_EPSILON: f64 = 1e-8;

/// One row of [`N_FEATURES`] features per particle.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    pub rows: Vec<[f64; N_FEATURES]>,
}

impl StateMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    /// Row-major copy.
    pub fn flat(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.iter().copied()).collect()
    }
}

/// Columns forced to zero, for ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureMask {
    pub zeroed: [bool; N_FEATURES],
}

impl FeatureMask {
    pub const NONE: FeatureMask = FeatureMask {
        zeroed: [false; N_FEATURES],
    };

    /// Drops the species-level context (normalized species fitness and
    /// distance to the species best).
    pub fn without_species(mut self) -> Self {
        self.zeroed[2] = true;
        self.zeroed[7] = true;
        self
    }

    /// Drops the archive drift signal.
    pub fn without_drift(mut self) -> Self {
        self.zeroed[0] = true;
        self
    }
}

/// Budget position of the run at observation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub fe: usize,
    pub fe_max: usize,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Builds the observation for every particle.
///
/// Columns: drift signal, population z-score, species z-score, remaining
/// budget, personal and global stagnation, distances to global, species and
/// personal best (over the box diameter), and the cosine between the
/// directions to the global and personal bests.
pub fn extract_state(swarm: &Swarm, ratio: f64, progress: Progress, diameter: f64, mask: FeatureMask) -> StateMatrix {
    let n = swarm.len();
    let t_max = progress.fe_max as f64 / n as f64;
    let drift = (ratio.log10() / 8.0).clamp(-1.0, 1.0);
    let drift = if drift.is_nan() { 0.0 } else { drift };
    let remaining = progress.fe_max.saturating_sub(progress.fe) as f64 / progress.fe_max as f64;
    let g_stag = (swarm.stagnation as f64 / t_max).min(1.0);
    let (pop_mean, pop_std) = mean_std(swarm.particles.iter().map(|p| p.f));

    let membership = swarm.membership();
    let species_best = swarm.species_best();
    let species_stats: Vec<(f64, f64)> = swarm
        .species
        .iter()
        .map(|s| mean_std(s.members.iter().map(|&i| swarm.particles[i].f)))
        .collect();

    let mut rows = Vec::with_capacity(n);
    let mut to_g = vec![0.0; swarm.gbest.len()];
    let mut to_p = vec![0.0; swarm.gbest.len()];
    for (i, p) in swarm.particles.iter().enumerate() {
        let j = membership[i];
        let (s_mean, s_std) = species_stats[j];
        let sbest = &swarm.particles[species_best[j]].pbest;
        for k in 0..p.x.len() {
            to_g[k] = swarm.gbest[k] - p.x[k];
            to_p[k] = p.pbest[k] - p.x[k];
        }
        let mut row = [
            drift,
            (p.f - pop_mean) / (pop_std + FEATURE_EPSILON),
            (p.f - s_mean) / (s_std + FEATURE_EPSILON),
            remaining,
            (p.stagnation as f64 / t_max).min(1.0),
            g_stag,
            (distance(&p.x, &swarm.gbest) / diameter).min(1.0),
            (distance(&p.x, sbest) / diameter).min(1.0),
            (distance(&p.x, &p.pbest) / diameter).min(1.0),
            cosine(&to_g, &to_p),
        ];
        for (v, z) in row.iter_mut().zip(mask.zeroed) {
            if z {
                *v = 0.0;
            }
        }
        rows.push(row);
    }
    StateMatrix { rows }
}
