use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::cluster::is_better;
use super::swarm::Swarm;
use crate::error::Result;
use crate::objective::Objective;

/// Number of past generations remembered by the archive.
pub const ARCHIVE_CAPACITY: usize = 5;

/// Guard used by the drift ratio.
pub const RATIO_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub position: Vec<f64>,
    /// Fitness before the most recent re-evaluation.
    pub f_prev: f64,
    /// Fitness under the most recently observed environment.
    pub f_cur: f64,
    pub generation: usize,
}

/// Best particle of each of the last few generations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EliteArchive {
    pub entries: VecDeque<ArchiveEntry>,
}

impl EliteArchive {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records the current generation's best particle, evicting the oldest
    /// entry beyond capacity.
    pub fn update(&mut self, swarm: &Swarm) {
        let best = &swarm.particles[swarm.best_current_index()];
        self.entries.push_back(ArchiveEntry {
            position: best.x.clone(),
            f_prev: best.f,
            f_cur: best.f,
            generation: swarm.generation,
        });
        while self.entries.len() > ARCHIVE_CAPACITY {
            self.entries.pop_front();
        }
    }

    /// Entry with the lowest current fitness.
    pub fn best(&self) -> Option<&ArchiveEntry> {
        self.entries
            .iter()
            .fold(None, |b: Option<&ArchiveEntry>, e| match b {
                Some(b) if b.f_cur <= e.f_cur => Some(b),
                _ => Some(e),
            })
    }

    /// Re-evaluates every entry under the current environment and returns the
    /// mean re-evaluated-to-stored fitness ratio. An empty archive reports 1.
    ///
    /// Each re-evaluation is charged to the objective's budget.
    pub fn reevaluate<O: Objective + ?Sized>(&mut self, objective: &mut O) -> Result<f64> {
        if self.entries.is_empty() {
            return Ok(1.0);
        }
        let mut sum = 0.0;
        for e in self.entries.iter_mut() {
            let f_new = objective.evaluate(&e.position)?;
            sum += drift_ratio(f_new, e.f_cur);
            e.f_prev = e.f_cur;
            e.f_cur = f_new;
        }
        Ok(sum / self.entries.len() as f64)
    }
}

/// Guarded ratio of a re-evaluated fitness to its stored value.
pub fn drift_ratio(f_new: f64, f_old: f64) -> f64 {
    (f_new.max(RATIO_EPSILON) + RATIO_EPSILON) / (f_old.max(RATIO_EPSILON) + RATIO_EPSILON)
}

/// Overwrites the worst member of every species with the archive's best
/// entry when that entry is strictly better.
///
/// The particle holding the global best memory is never chosen, so
/// injection cannot lose the global best. The replaced particle's memory is
/// reset to the injected solution and its velocity zeroed. Returns the
/// number of replaced particles.
pub fn archive_reinject(swarm: &mut Swarm, archive: &EliteArchive) -> usize {
    let Some(best) = archive.best() else {
        return 0;
    };
    let keeper = swarm.best_pbest_index();
    let fitness = swarm.fitness();
    let mut targets = Vec::new();
    for s in &swarm.species {
        let worst = s
            .members
            .iter()
            .copied()
            .filter(|&i| i != keeper)
            .fold(None, |w: Option<usize>, i| match w {
                Some(w) if is_better(&fitness, i, w) => Some(w),
                _ => Some(i),
            });
        if let Some(w) = worst {
            if best.f_cur < fitness[w] {
                targets.push(w);
            }
        }
    }
    for &w in &targets {
        let p = &mut swarm.particles[w];
        p.x.clone_from(&best.position);
        p.v.iter_mut().for_each(|v| *v = 0.0);
        p.f = best.f_cur;
        p.pbest.clone_from(&best.position);
        p.pbest_f = best.f_cur;
        p.stagnation = 0;
    }
    if !targets.is_empty() {
        swarm.refresh_gbest();
    }
    targets.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbnc::swarm::init_swarm;
    use crate::objective::FnObjective;
    use crate::rng::stream;
    use alloc::vec;

    fn scaled_bowl(scale: f64) -> FnObjective<impl FnMut(&[f64], usize) -> f64> {
        FnObjective::new(vec![-5.0; 3], vec![5.0; 3], 10_000, move |x: &[f64], _| {
            scale * (1.0 + x.iter().map(|v| v * v).sum::<f64>())
        })
    }

    #[test]
    fn capacity_and_order() {
        let mut obj = scaled_bowl(1.0);
        let mut s = init_swarm(&mut obj, 4, &mut stream(0, "init", 0)).unwrap();
        let mut ar = EliteArchive::default();
        let mut recorded = Vec::new();
        for g in 0..6 {
            s.generation = g;
            s.particles[0].x = vec![g as f64 * 0.1; 3];
            s.particles[0].f = -1.0 - g as f64;
            ar.update(&s);
            recorded.push(s.particles[0].x.clone());
            assert_eq!(ar.len(), (g + 1).min(5));
        }
        let kept: Vec<_> = ar.entries.iter().map(|e| e.position.clone()).collect();
        assert_eq!(kept, recorded[1..].to_vec());
        assert_eq!(ar.entries[0].generation, 1);
    }

    #[test]
    fn empty_archive_ratio_is_one() {
        let mut obj = scaled_bowl(1.0);
        assert_eq!(EliteArchive::default().reevaluate(&mut obj).unwrap(), 1.0);
        assert_eq!(obj.fe_used(), 0);
    }

    #[test]
    fn frozen_environment_ratio_is_one_and_charges_budget() {
        let mut obj = scaled_bowl(1.0);
        let s = init_swarm(&mut obj, 4, &mut stream(0, "init", 0)).unwrap();
        let mut ar = EliteArchive::default();
        ar.update(&s);
        ar.update(&s);
        let used = obj.fe_used();
        assert_eq!(ar.reevaluate(&mut obj).unwrap(), 1.0);
        assert_eq!(obj.fe_used(), used + 2);
    }

    #[test]
    fn single_entry_ratio() {
        let r = drift_ratio(8.0, 2.0);
        assert!((r - 4.0).abs() < 1e-7);
        // both clamped at epsilon
        assert_eq!(drift_ratio(-3.0, 0.0), 1.0);
    }

    #[test]
    fn hundredfold_scaling_is_detected() {
        let mut obj = scaled_bowl(1.0);
        let s = init_swarm(&mut obj, 6, &mut stream(1, "init", 0)).unwrap();
        let mut ar = EliteArchive::default();
        ar.update(&s);
        let mut scaled = scaled_bowl(100.0);
        let r = ar.reevaluate(&mut scaled).unwrap();
        assert!((r - 100.0).abs() < 1e-6, "{r}");
        assert_eq!(ar.entries[0].f_cur, 100.0 * ar.entries[0].f_prev);
    }

    #[test]
    fn reinjection_replaces_worst_and_never_raises_it() {
        let mut obj = scaled_bowl(1.0);
        let mut s = init_swarm(&mut obj, 8, &mut stream(2, "init", 0)).unwrap();
        s.speciate(2.0);
        let mut ar = EliteArchive::default();
        ar.update(&s);
        ar.entries[0].f_cur = 0.5;
        let worst_before: Vec<f64> = s
            .species
            .iter()
            .map(|sp| sp.members.iter().map(|&i| s.particles[i].f).fold(f64::MIN, f64::max))
            .collect();
        let replaced = archive_reinject(&mut s, &ar);
        assert!(replaced >= 1);
        for (sp, before) in s.species.iter().zip(worst_before) {
            let after = sp.members.iter().map(|&i| s.particles[i].f).fold(f64::MIN, f64::max);
            assert!(after <= before);
        }
        assert_eq!(s.gbest_f, 0.5);
    }

    #[test]
    fn two_particles_one_replaced() {
        let mut obj = scaled_bowl(1.0);
        let mut s = init_swarm(&mut obj, 2, &mut stream(3, "init", 0)).unwrap();
        let mut ar = EliteArchive::default();
        ar.update(&s);
        ar.entries[0].f_cur = -1.0;
        assert_eq!(archive_reinject(&mut s, &ar), 1);
    }
}
