use super::archive::{archive_reinject, EliteArchive, ARCHIVE_CAPACITY};
use super::swarm::{init_swarm, pso_step, HyperMatrix, Swarm};
use crate::error::Result;
use crate::objective::Objective;
use crate::rng::StreamRng;

/// Swarm, archive and the most recent drift ratio of one optimizer run.
#[derive(Debug, Clone)]
pub struct SwarmRun {
    pub swarm: Swarm,
    pub archive: EliteArchive,
    pub ratio: f64,
    pub follow_factor: f64,
}

/// What one generation did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub gbest_prev_f: f64,
    pub gbest_f: f64,
    pub ratio: f64,
    pub reinjected: usize,
    pub species: usize,
}

impl SwarmRun {
    /// Evaluates an initial swarm and clusters it. The archive starts empty.
    pub fn start<O: Objective + ?Sized>(
        objective: &mut O,
        n: usize,
        follow_factor: f64,
        rng: &mut StreamRng,
    ) -> Result<Self> {
        let mut swarm = init_swarm(objective, n, rng)?;
        swarm.speciate(follow_factor);
        Ok(Self {
            swarm,
            archive: EliteArchive::default(),
            ratio: 1.0,
            follow_factor,
        })
    }

    /// Evaluations the next generation will charge: the swarm plus the
    /// archive after it records this generation.
    pub fn step_cost(&self) -> usize {
        self.swarm.len() + (self.archive.len() + 1).min(ARCHIVE_CAPACITY)
    }

    /// One generation: move and evaluate, re-cluster, record the generation
    /// best, re-inject into species, then re-evaluate the archive.
    pub fn step<O: Objective + ?Sized>(
        &mut self,
        h: &HyperMatrix,
        objective: &mut O,
        rng: &mut StreamRng,
    ) -> Result<StepReport> {
        let gbest_prev_f = self.swarm.gbest_f;
        pso_step(&mut self.swarm, h, objective, rng)?;
        self.swarm.speciate(self.follow_factor);
        self.archive.update(&self.swarm);
        let reinjected = archive_reinject(&mut self.swarm, &self.archive);
        self.ratio = self.archive.reevaluate(objective)?;
        Ok(StepReport {
            gbest_prev_f,
            gbest_f: self.swarm.gbest_f,
            ratio: self.ratio,
            reinjected,
            species: self.swarm.species.len(),
        })
    }
}
