use dynopt_core::navsim::{
    path_fitness, run_episode, segment_hits_circle, Hazard, Motion, NavConfig, Obstacle, PathProblem, Point, Scenario,
    ARENA,
};
use dynopt_core::ppo::{Controller, Wiring, FIXED_BASELINE};
use dynopt_core::rng::stream;
use proptest::prelude::*;
use rand::Rng;

/// Roots of `|a + t (b - a) - c|^2 = r^2`; the segment meets the open disc
/// when the chord between the roots overlaps `[0, 1]`.
fn quadratic_hit(a: Point, b: Point, c: Point, r: f64) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let f = [a[0] - c[0], a[1] - c[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
    let qc = f[0] * f[0] + f[1] * f[1] - r * r;
    if qa == 0.0 {
        return qc < 0.0;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return false;
    }
    let s = disc.sqrt();
    let (t0, t1) = ((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa));
    t0 < 1.0 && t1 > 0.0
}

fn point(rng: &mut impl Rng) -> Point {
    [rng.random_range(0.0..ARENA), rng.random_range(0.0..ARENA)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn segment_test_agrees_with_the_quadratic(seed in any::<u64>()) {
        let mut rng = stream(seed, "segment", 0);
        let (a, b, c) = (point(&mut rng), point(&mut rng), point(&mut rng));
        let r = rng.random_range(1.0..120.0);
        let ours = segment_hits_circle(a, b, c, r);
        let oracle = quadratic_hit(a, b, c, r);
        // Tangent configurations are left to rounding.
        let nudged = quadratic_hit(a, b, c, r * (1.0 + 1e-9)) != quadratic_hit(a, b, c, r * (1.0 - 1e-9));
        prop_assert!(nudged || ours == oracle, "{:?} {:?} {:?} r={}", a, b, c, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fitness_ignores_obstacle_order(seed in any::<u64>(), k in 0usize..10, segments in 2usize..8) {
        let mut rng = stream(seed, "problem", 0);
        let hazards: Vec<Hazard> = (0..k)
            .map(|_| Hazard { now: point(&mut rng), next: point(&mut rng), radius: rng.random_range(5.0..60.0) })
            .collect();
        let wp: Vec<f64> = (0..2 * (segments - 1)).map(|_| rng.random_range(0.0..ARENA)).collect();
        let problem = PathProblem { start: point(&mut rng), goal: point(&mut rng), hazards };
        let mut shuffled = problem.clone();
        for i in (1..k).rev() {
            shuffled.hazards.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(path_fitness(&wp, &problem), path_fitness(&wp, &shuffled));
    }
}

#[test]
fn reflection_keeps_obstacles_in_the_arena() {
    let mut rng = stream(5, "obstacles", 0);
    let mut obstacles: Vec<Obstacle> = (0..20)
        .map(|i| {
            let speed = rng.random_range(0.5..60.0);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            Obstacle {
                center: point(&mut rng),
                radius: 10.0,
                velocity: [speed * theta.cos(), speed * theta.sin()],
                motion: if i % 2 == 0 { Motion::Consistent } else { Motion::Random },
            }
        })
        .collect();
    for _ in 0..10_000 {
        for o in &mut obstacles {
            o.advance(&mut rng);
            assert!(o.center.iter().all(|v| (0.0..=ARENA).contains(v)), "{:?}", o.center);
        }
    }
}

#[test]
fn episodes_respect_the_evaluation_budget() {
    for case in [1u8, 6] {
        let s = Scenario::case(case, 4).unwrap();
        let (res, trace) = run_episode(
            &s,
            Controller::Fixed(FIXED_BASELINE),
            Wiring::default(),
            NavConfig::default(),
            4,
        )
        .unwrap();
        assert!(res.fe_total <= s.max_frames * s.fe_per_frame);
        assert!(res.max_frame_fe <= s.fe_per_frame);
        assert_eq!(res.fe_total, trace.len() * s.fe_per_frame);
    }
}
