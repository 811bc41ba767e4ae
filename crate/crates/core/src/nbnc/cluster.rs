//! Nearest-better neighbour clustering.
//!
//! Every particle links to its nearest strictly better particle; links longer
//! than `follow_factor` times the mean nearest-neighbour distance are cut.
//! The remaining forest's trees are the raw species, rooted at their best
//! member. Raw species are then merged into dominating species until no
//! dominance remains.

use alloc::vec;

use crate::prelude::*;

/// A niche: indices of its members, ascending, and its best member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub seed: usize,
    pub members: Vec<usize>,
}

/// Strict total order on particles: lower fitness wins, ties go to the lower
/// index.
#[inline]
pub fn is_better(fitness: &[f64], a: usize, b: usize) -> bool {
    fitness[a] < fitness[b] || (fitness[a] == fitness[b] && a < b)
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn distance_matrix(positions: &[Vec<f64>]) -> Vec<f64> {
    let n = positions.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = distance(&positions[i], &positions[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Raw species from nearest-better links.
pub fn cluster_nbnc(positions: &[Vec<f64>], fitness: &[f64], follow_factor: f64) -> Vec<Species> {
    let n = positions.len();
    if n <= 1 {
        return (0..n)
            .map(|i| Species {
                seed: i,
                members: vec![i],
            })
            .collect();
    }
    let dist = distance_matrix(positions);
    let mean_nn = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| dist[i * n + j])
                .fold(f64::INFINITY, f64::min)
        })
        .sum::<f64>()
        / n as f64;
    let threshold = follow_factor * mean_nn;

    let mut parent: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut nearest: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i || !is_better(fitness, j, i) {
                continue;
            }
            let d = dist[i * n + j];
            if nearest.is_none_or(|(_, bd)| d < bd) {
                nearest = Some((j, d));
            }
        }
        if let Some((j, d)) = nearest {
            if d <= threshold {
                parent[i] = Some(j);
            }
        }
    }

    // Links always point to a strictly better particle, so following them
    // terminates at the tree root.
    let root = |mut i: usize| {
        while let Some(p) = parent[i] {
            i = p;
        }
        i
    };
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        by_root[root(i)].push(i);
    }
    let mut out: Vec<Species> = by_root
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(seed, members)| Species { seed, members })
        .collect();
    sort_species(&mut out, fitness);
    out
}

/// Merges dominated species into their dominators until a fixed point.
///
/// Species `a` is dominated by `b` when `b`'s seed is better than `a`'s and
/// `a`'s seed lies strictly closer to `b`'s seed than `b`'s farthest member.
/// The worst dominated species is merged first, into its nearest dominator.
pub fn merge_species(mut species: Vec<Species>, positions: &[Vec<f64>], fitness: &[f64]) -> Vec<Species> {
    loop {
        sort_species(&mut species, fitness);
        let radii: Vec<f64> = species
            .iter()
            .map(|s| {
                s.members
                    .iter()
                    .map(|&m| distance(&positions[m], &positions[s.seed]))
                    .fold(0.0, f64::max)
            })
            .collect();
        let mut merge: Option<(usize, usize)> = None;
        'outer: for a in (0..species.len()).rev() {
            let mut best: Option<(usize, f64)> = None;
            for b in 0..species.len() {
                if b == a || !is_better(fitness, species[b].seed, species[a].seed) {
                    continue;
                }
                let d = distance(&positions[species[a].seed], &positions[species[b].seed]);
                if d < radii[b] && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((b, d));
                }
            }
            if let Some((b, _)) = best {
                merge = Some((a, b));
                break 'outer;
            }
        }
        match merge {
            None => return species,
            Some((a, b)) => {
                let absorbed = species.remove(a);
                let b = if b > a { b - 1 } else { b };
                species[b].members.extend(absorbed.members);
                species[b].members.sort_unstable();
            }
        }
    }
}

/// Best seed first.
fn sort_species(species: &mut [Species], fitness: &[f64]) {
    species.sort_by(|a, b| {
        if a.seed == b.seed {
            core::cmp::Ordering::Equal
        } else if is_better(fitness, a.seed, b.seed) {
            core::cmp::Ordering::Less
        } else {
            core::cmp::Ordering::Greater
        }
    });
}

/// Clusters and merges in one call.
pub fn speciate(positions: &[Vec<f64>], fitness: &[f64], follow_factor: f64) -> Vec<Species> {
    merge_species(cluster_nbnc(positions, fitness, follow_factor), positions, fitness)
}
