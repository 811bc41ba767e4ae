//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use dynopt_core::mdp::{StateMatrix, N_FEATURES};
use dynopt_core::nbnc::{distance, Particle, Species, Swarm};
use dynopt_core::policy::{backward, forward_batch, PolicyConfig, PolicyParams};
use dynopt_core::rng::stream;
use rand::Rng;

pub fn random_state(rng: &mut impl Rng, n: usize, scale: f64) -> StateMatrix {
    StateMatrix {
        rows: (0..n)
            .map(|_| {
                let mut r = [0.0; N_FEATURES];
                r.iter_mut().for_each(|v| *v = rng.random_range(-scale..scale));
                r
            })
            .collect(),
    }
}

/// Magnitudes spanning many decades, either sign.
pub fn wide_value(rng: &mut impl Rng) -> f64 {
    let m = 10f64.powf(rng.random_range(-6.0..6.0));
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

/// A swarm with arbitrary memories, fitness and stagnation counters, already
/// clustered. Positions lie in `[-5, 5]^d`.
pub fn random_swarm(rng: &mut impl Rng, n: usize, d: usize) -> Swarm {
    let point = |rng: &mut dyn rand::RngCore| -> Vec<f64> { (0..d).map(|_| rng.random_range(-5.0..5.0)).collect() };
    let particles: Vec<Particle> = (0..n)
        .map(|_| {
            let x = point(rng);
            // Occasionally sit exactly on the memory.
            let pbest = if rng.random_bool(0.2) { x.clone() } else { point(rng) };
            Particle {
                v: vec![0.0; d],
                f: wide_value(rng),
                pbest_f: wide_value(rng),
                stagnation: rng.random_range(0..400),
                x,
                pbest,
            }
        })
        .collect();
    let mut s = Swarm {
        particles,
        gbest: Vec::new(),
        gbest_f: f64::INFINITY,
        stagnation: 0,
        species: vec![Species {
            seed: 0,
            members: (0..n).collect(),
        }],
        generation: rng.random_range(0..1000),
    };
    s.refresh_gbest();
    s.stagnation = rng.random_range(0..400);
    s.speciate(rng.random_range(0.5..3.0));
    s
}

/// Raw nearest-better species by exhaustive link enumeration and
/// connected-component labelling. Returned as `(seed, members)` sorted by seed.
pub fn nbnc_oracle(pos: &[Vec<f64>], f: &[f64], follow_factor: f64) -> Vec<(usize, Vec<usize>)> {
    let n = pos.len();
    let better = |a: usize, b: usize| (f[a], a) < (f[b], b);
    let mean_nn = if n > 1 {
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| distance(&pos[i], &pos[j]))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / n as f64
    } else {
        0.0
    };
    let mut edges = Vec::new();
    for i in 0..n {
        let mut cands: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i && better(j, i))
            .map(|j| (distance(&pos[i], &pos[j]), j))
            .collect();
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Some(&(d, j)) = cands.first() {
            if d <= follow_factor * mean_nn {
                edges.push((i, j));
            }
        }
    }
    // Label propagation to a fixed point: every node takes the smallest label
    // among its neighbours.
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b) in &edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for l in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == l).collect();
        if members.is_empty() {
            continue;
        }
        let seed = members.iter().copied().fold(members[0], |b, i| if better(i, b) { i } else { b });
        out.push((seed, members));
    }
    out.sort();
    out
}

pub fn species_as_pairs(species: &[Species]) -> Vec<(usize, Vec<usize>)> {
    let mut v: Vec<(usize, Vec<usize>)> = species.iter().map(|s| (s.seed, s.members.clone())).collect();
    v.sort();
    v
}

/// One recorded evaluation: observed value, true optimum, new-environment flag.
pub type TraceEntry = (f64, f64, bool);

pub fn random_trace(rng: &mut impl Rng, len: usize) -> Vec<TraceEntry> {
    let mut opt = rng.random_range(-10.0..10.0);
    (0..len)
        .map(|t| {
            let transition = t > 0 && rng.random_bool(0.05);
            if transition {
                opt = rng.random_range(-10.0..10.0);
            }
            (opt + rng.random_range(-1.0..50.0), opt, transition)
        })
        .collect()
}

/// Offline error by re-deriving every best-so-far from scratch.
pub fn offline_error_direct(trace: &[TraceEntry]) -> f64 {
    let mut sum = 0.0;
    for t in 0..trace.len() {
        let start = (0..=t).rev().find(|&s| trace[s].2).unwrap_or(0);
        let best = trace[start..=t].iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        sum += (best - trace[t].1).max(0.0);
    }
    sum / trace.len() as f64
}

/// Fixed-target loss over a small batch: log-probability, an entropy bonus,
/// value regression and a linear probe on the means.
pub struct GradProbe {
    pub states: Vec<StateMatrix>,
    pub actions: Vec<Vec<f64>>,
    pub returns: Vec<f64>,
    pub mu_weights: Vec<f64>,
}

impl GradProbe {
    pub fn new(seed: u64, batch: usize, n: usize) -> Self {
        let mut rng = stream(seed, "probe", 0);
        let states = (0..batch).map(|_| random_state(&mut rng, n, 1.5)).collect();
        let actions = (0..batch)
            .map(|_| (0..n * 3).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let returns = (0..batch).map(|_| rng.random_range(-1.0..2.0)).collect();
        let mu_weights = (0..batch * n * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
        GradProbe {
            states,
            actions,
            returns,
            mu_weights,
        }
    }

    pub fn loss(&self, p: &PolicyParams<f64>) -> f64 {
        let refs: Vec<&StateMatrix> = self.states.iter().collect();
        let (out, _) = forward_batch(p, &refs).unwrap();
        let mut total = 0.0;
        for (b, head) in out.heads.iter().enumerate() {
            let (lp, ent) = head.log_prob_and_entropy(&self.actions[b]);
            total += lp + 0.3 * ent + 0.5 * (out.values[b] - self.returns[b]).powi(2);
            let w = &self.mu_weights[b * head.mu.len()..(b + 1) * head.mu.len()];
            total += head.mu.iter().zip(w).map(|(m, w)| m * w).sum::<f64>();
        }
        total
    }

    pub fn analytic(&self, p: &PolicyParams<f64>) -> Vec<f64> {
        let refs: Vec<&StateMatrix> = self.states.iter().collect();
        let (out, cache) = forward_batch(p, &refs).unwrap();
        let mut d_mu = self.mu_weights.clone();
        let mut d_sigma = vec![0.0; d_mu.len()];
        let mut d_v = Vec::new();
        for (b, head) in out.heads.iter().enumerate() {
            let r = b * head.mu.len()..(b + 1) * head.mu.len();
            let (dm, ds) = (&mut d_mu[r.clone()], &mut d_sigma[r]);
            head.log_prob_grad(&self.actions[b], 1.0, dm, ds);
            head.entropy_grad(0.3, ds);
            d_v.push(out.values[b] - self.returns[b]);
        }
        backward(p, &cache, &d_mu, &d_sigma, &d_v).unwrap()
    }
}

/// Per-tensor comparison of analytic and central-difference gradients.
pub struct TensorCheck {
    pub name: String,
    /// `‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖)`.
    pub rel_err: f64,
    pub abs_err: f64,
    pub scale: f64,
}

impl TensorCheck {
    /// Relative error within `tol`; tensors whose exact gradient vanishes
    /// are compared absolutely.
    pub fn passes(&self, tol: f64) -> bool {
        if self.scale < 1e-7 {
            self.abs_err < 1e-7
        } else {
            self.rel_err <= tol
        }
    }
}

pub fn finite_difference_check(cfg: PolicyConfig, seed: u64, batch: usize, n: usize, h: f64) -> Vec<TensorCheck> {
    let mut p = PolicyParams::<f64>::init(cfg, &mut stream(seed, "init", 0)).unwrap();
    let probe = GradProbe::new(seed, batch, n);
    let grad = probe.analytic(&p);
    let specs = p.specs().to_vec();
    specs
        .iter()
        .map(|spec| {
            let mut num = Vec::with_capacity(spec.len);
            for i in spec.offset..spec.offset + spec.len {
                let orig = p.flat()[i];
                p.flat_mut()[i] = orig + h;
                let up = probe.loss(&p);
                p.flat_mut()[i] = orig - h;
                let down = probe.loss(&p);
                p.flat_mut()[i] = orig;
                num.push((up - down) / (2.0 * h));
            }
            let ana = &grad[spec.offset..spec.offset + spec.len];
            let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|a| a * a).sum::<f64>().sqrt();
            let abs_err = norm(&mut ana.iter().zip(&num).map(|(a, n)| a - n));
            let scale = norm(&mut ana.iter().copied()).max(norm(&mut num.iter().copied()));
            TensorCheck {
                name: spec.name.clone(),
                rel_err: if scale > 0.0 { abs_err / scale } else { 0.0 },
                abs_err,
                scale,
            }
        })
        .collect()
}
