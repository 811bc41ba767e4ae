use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::cluster::{is_better, speciate, Species};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::StreamRng;

/// Fraction of the box range a velocity component may reach.
pub const VELOCITY_CLAMP: f64 = 0.2;

/// Default follow factor for nearest-better link cutting.
pub const DEFAULT_FOLLOW_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub f: f64,
    pub pbest: Vec<f64>,
    pub pbest_f: f64,
    /// Generations since `pbest` last strictly improved.
    pub stagnation: usize,
}

/// Per-particle PSO coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Hyper {
    pub const fn new(w: f64, c1: f64, c2: f64) -> Self {
        Self { w, c1, c2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperMatrix(pub Vec<Hyper>);

impl HyperMatrix {
    pub fn uniform(n: usize, h: Hyper) -> Self {
        Self(vec![h; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest: Vec<f64>,
    pub gbest_f: f64,
    /// Generations since `gbest_f` last strictly improved.
    pub stagnation: usize,
    pub species: Vec<Species>,
    pub generation: usize,
}

/// Uniform initial swarm with zero velocities, evaluated once.
///
/// Starts as a single species; call [`Swarm::speciate`] to cluster it.
pub fn init_swarm<O: Objective + ?Sized>(objective: &mut O, n: usize, rng: &mut StreamRng) -> Result<Swarm> {
    if n < 2 {
        return Err(Error::Config("swarm needs at least two particles"));
    }
    let d = objective.dim();
    let mut particles = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..d)
            .map(|k| rng.random_range(objective.lower()[k]..objective.upper()[k]))
            .collect();
        particles.push(Particle {
            x: x.clone(),
            v: vec![0.0; d],
            f: f64::NAN,
            pbest: x,
            pbest_f: f64::NAN,
            stagnation: 0,
        });
    }
    for p in particles.iter_mut() {
        p.f = objective.evaluate(&p.x)?;
        p.pbest_f = p.f;
    }
    let mut swarm = Swarm {
        particles,
        gbest: Vec::new(),
        gbest_f: f64::INFINITY,
        stagnation: 0,
        species: vec![Species {
            seed: 0,
            members: (0..n).collect(),
        }],
        generation: 0,
    };
    let best = swarm.best_pbest_index();
    swarm.gbest = swarm.particles[best].pbest.clone();
    swarm.gbest_f = swarm.particles[best].pbest_f;
    swarm.species[0].seed = swarm.best_current_index();
    Ok(swarm)
}

impl Swarm {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn fitness(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.f).collect()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.particles.iter().map(|p| p.x.clone()).collect()
    }

    /// Particle holding the global best memory (ties to the lower index).
    pub fn best_pbest_index(&self) -> usize {
        let pf: Vec<f64> = self.particles.iter().map(|p| p.pbest_f).collect();
        (1..self.len()).fold(0, |b, i| if is_better(&pf, i, b) { i } else { b })
    }

    /// Particle with the best current fitness.
    pub fn best_current_index(&self) -> usize {
        let f = self.fitness();
        (1..self.len()).fold(0, |b, i| if is_better(&f, i, b) { i } else { b })
    }

    /// Species index of every particle.
    pub fn membership(&self) -> Vec<usize> {
        let mut m = vec![0; self.len()];
        for (j, s) in self.species.iter().enumerate() {
            for &i in &s.members {
                m[i] = j;
            }
        }
        m
    }

    /// Best-found position of each species: the member memory with the
    /// lowest personal-best fitness.
    pub fn species_best(&self) -> Vec<usize> {
        let pf: Vec<f64> = self.particles.iter().map(|p| p.pbest_f).collect();
        self.species
            .iter()
            .map(|s| {
                s.members
                    .iter()
                    .copied()
                    .fold(s.members[0], |b, i| if is_better(&pf, i, b) { i } else { b })
            })
            .collect()
    }

    /// Re-partitions the swarm by nearest-better clustering plus merging.
    pub fn speciate(&mut self, follow_factor: f64) {
        self.species = speciate(&self.positions(), &self.fitness(), follow_factor);
    }

    /// Recomputes the global best from the personal bests.
    pub fn refresh_gbest(&mut self) {
        let best = self.best_pbest_index();
        let p = &self.particles[best];
        if p.pbest_f < self.gbest_f {
            self.stagnation = 0;
        }
        self.gbest_f = p.pbest_f;
        self.gbest = p.pbest.clone();
    }
}

/// One synchronous PSO generation with per-particle coefficients.
///
/// Each particle is pulled towards its own memory and its species' best
/// memory. Velocities are clamped to a fraction of the range; positions are
/// clamped to the box with the offending velocity component zeroed.
pub fn pso_step<O: Objective + ?Sized>(
    swarm: &mut Swarm,
    h: &HyperMatrix,
    objective: &mut O,
    rng: &mut StreamRng,
) -> Result<()> {
    let n = swarm.len();
    if h.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: h.len(),
        });
    }
    let lower = objective.lower().to_vec();
    let upper = objective.upper().to_vec();
    let membership = swarm.membership();
    let sbest: Vec<Vec<f64>> = swarm
        .species_best()
        .into_iter()
        .map(|i| swarm.particles[i].pbest.clone())
        .collect();

    for (i, p) in swarm.particles.iter_mut().enumerate() {
        let Hyper { w, c1, c2 } = h.0[i];
        let social = &sbest[membership[i]];
        for k in 0..p.x.len() {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let vmax = VELOCITY_CLAMP * (upper[k] - lower[k]);
            let v = w * p.v[k] + c1 * r1 * (p.pbest[k] - p.x[k]) + c2 * r2 * (social[k] - p.x[k]);
            let v = v.clamp(-vmax, vmax);
            let x = p.x[k] + v;
            if x > upper[k] {
                p.x[k] = upper[k];
                p.v[k] = 0.0;
            } else if x < lower[k] {
                p.x[k] = lower[k];
                p.v[k] = 0.0;
            } else {
                p.x[k] = x;
                p.v[k] = v;
            }
        }
    }

    for p in swarm.particles.iter_mut() {
        p.f = objective.evaluate(&p.x)?;
        if p.f < p.pbest_f {
            p.pbest_f = p.f;
            p.pbest.clone_from(&p.x);
            p.stagnation = 0;
        } else {
            p.stagnation += 1;
        }
    }

    let before = swarm.gbest_f;
    swarm.refresh_gbest();
    if !(swarm.gbest_f < before) {
        swarm.stagnation += 1;
    }
    swarm.generation += 1;
    Ok(())
}
