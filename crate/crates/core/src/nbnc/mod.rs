//! Nearest-better clustering PSO with an elite archive.

mod archive;
mod cluster;
mod stack;
mod swarm;

pub use archive::{archive_reinject, drift_ratio, ArchiveEntry, EliteArchive, ARCHIVE_CAPACITY, RATIO_EPSILON};
pub use cluster::{cluster_nbnc, distance, is_better, merge_species, speciate, Species};
pub use stack::{StepReport, SwarmRun};
pub use swarm::{
    init_swarm, pso_step, Hyper, HyperMatrix, Particle, Swarm, DEFAULT_FOLLOW_FACTOR, VELOCITY_CLAMP,
};
