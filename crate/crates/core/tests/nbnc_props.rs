mod support;

use dynopt_core::nbnc::{cluster_nbnc, pso_step, Hyper, HyperMatrix, SwarmRun, ARCHIVE_CAPACITY};
use dynopt_core::rng::stream;
use dynopt_core::{FnObjective, Objective};
use proptest::prelude::*;
use rand::Rng;
use support::{nbnc_oracle, random_swarm, species_as_pairs};

fn random_hyper(rng: &mut impl Rng, n: usize) -> HyperMatrix {
    HyperMatrix(
        (0..n)
            .map(|_| Hyper::new(rng.random_range(0.0..1.0), rng.random_range(0.0..4.1), rng.random_range(0.0..4.1)))
            .collect(),
    )
}

fn rastrigin(d: usize, fe_max: usize) -> FnObjective<impl FnMut(&[f64], usize) -> f64> {
    FnObjective::new(vec![-5.12; d], vec![5.12; d], fe_max, |x: &[f64], _| {
        x.iter()
            .map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos() + 10.0)
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clustering_matches_exhaustive_oracle(
        seed in any::<u64>(),
        n in 1usize..=12,
        d in 1usize..=4,
        phi in 0.3f64..4.0,
        ties in any::<bool>(),
    ) {
        let mut rng = stream(seed, "swarm", 0);
        let pos: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        // Integer fitness forces ties through the index tie-break.
        let f: Vec<f64> = (0..n)
            .map(|_| if ties { rng.random_range(0..4) as f64 } else { rng.random_range(-10.0..10.0) })
            .collect();
        prop_assert_eq!(species_as_pairs(&cluster_nbnc(&pos, &f, phi)), nbnc_oracle(&pos, &f, phi));
    }

    #[test]
    fn species_partition_the_swarm(seed in any::<u64>(), n in 2usize..40, d in 1usize..6) {
        let s = random_swarm(&mut stream(seed, "swarm", 0), n, d);
        let mut all: Vec<usize> = s.species.iter().flat_map(|sp| sp.members.clone()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for sp in &s.species {
            prop_assert!(sp.members.contains(&sp.seed));
        }
    }

    #[test]
    fn gbest_tracks_best_memory_on_a_static_landscape(seed in any::<u64>(), n in 4usize..16) {
        let mut obj = rastrigin(3, 3_000);
        let mut rng = stream(seed, "run", 0);
        let mut run = SwarmRun::start(&mut obj, n, 2.0, &mut rng).unwrap();
        let mut prev = run.swarm.gbest_f;
        while obj.remaining() >= run.step_cost() {
            let h = random_hyper(&mut rng, n);
            let report = run.step(&h, &mut obj, &mut rng).unwrap();
            let min_pbest = run.swarm.particles.iter().map(|p| p.pbest_f).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(run.swarm.gbest_f, min_pbest);
            prop_assert!(run.swarm.gbest_f <= prev);
            prop_assert!(run.archive.len() <= ARCHIVE_CAPACITY);
            // Frozen landscape: re-evaluation reproduces stored values.
            prop_assert_eq!(report.ratio, 1.0);
            prev = run.swarm.gbest_f;
        }
    }

    #[test]
    fn drift_ratio_is_never_negative(seed in any::<u64>(), scale in -3.0f64..3.0) {
        let mut rng = stream(seed, "run", 0);
        let factor = 10f64.powf(scale);
        let mut obj = FnObjective::new(vec![-5.0; 2], vec![5.0; 2], 2_000, move |x: &[f64], fe| {
            let v: f64 = x.iter().map(|v| v * v).sum::<f64>() - 3.0;
            if fe >= 1_000 { v * factor } else { v }
        });
        let mut run = SwarmRun::start(&mut obj, 8, 2.0, &mut rng).unwrap();
        while obj.remaining() >= run.step_cost() {
            let h = HyperMatrix::uniform(8, Hyper::new(0.7298, 1.49618, 1.49618));
            let report = run.step(&h, &mut obj, &mut rng).unwrap();
            prop_assert!(report.ratio >= 0.0);
        }
    }
}

#[test]
fn pso_keeps_every_coordinate_in_the_box() {
    let mut rng = stream(11, "pso", 0);
    let mut steps = 0;
    while steps < 10_000 {
        let d = rng.random_range(1..6);
        let n = rng.random_range(2..12);
        let mut obj = rastrigin(d, usize::MAX);
        let mut swarm = dynopt_core::nbnc::init_swarm(&mut obj, n, &mut rng).unwrap();
        for _ in 0..100 {
            let h = random_hyper(&mut rng, n);
            pso_step(&mut swarm, &h, &mut obj, &mut rng).unwrap();
            swarm.speciate(2.0);
            for p in &swarm.particles {
                assert!(p.x.iter().all(|&v| (-5.12..=5.12).contains(&v)));
            }
            steps += 1;
        }
    }
}
