mod support;

use dynopt_core::mdp::StateMatrix;
use dynopt_core::policy::{forward, PolicyConfig, PolicyParams, SIGMA_MAX, SIGMA_MIN};
use dynopt_core::rng::stream;
use proptest::prelude::*;
use rand::Rng;
use support::random_state;

fn policy(seed: u64) -> PolicyParams<f64> {
    PolicyParams::init(PolicyConfig::tiny(16), &mut stream(seed, "init", 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_permute_with_the_swarm(seed in any::<u64>(), n in 1usize..24) {
        let p = policy(seed);
        let mut rng = stream(seed, "state", 0);
        let state = random_state(&mut rng, n, 2.0);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let shuffled = StateMatrix { rows: perm.iter().map(|&i| state.rows[i]).collect() };
        let (a, va, _) = forward(&p, &state).unwrap();
        let (b, vb, _) = forward(&p, &shuffled).unwrap();
        prop_assert!((va - vb).abs() < 1e-5);
        let m = a.n_actions;
        for (k, &i) in perm.iter().enumerate() {
            for c in 0..m {
                prop_assert!((b.mu[k * m + c] - a.mu[i * m + c]).abs() < 1e-5);
                prop_assert!((b.sigma[k * m + c] - a.sigma[i * m + c]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn heads_stay_bounded_on_extreme_inputs(seed in any::<u64>(), n in 1usize..12, log_mag in 0.0f64..6.0) {
        let p = policy(seed);
        let state = random_state(&mut stream(seed, "state", 0), n, 10f64.powf(log_mag));
        let (head, value, _) = forward(&p, &state).unwrap();
        prop_assert!(value.is_finite());
        prop_assert_eq!(head.rows(), n);
        prop_assert!(head.mu.iter().all(|m| (0.0..=1.0).contains(m)));
        prop_assert!(head.sigma.iter().all(|s| (SIGMA_MIN..=SIGMA_MAX).contains(s)));
    }
}

#[test]
fn one_parameter_set_serves_every_swarm_size() {
    let p = PolicyParams::<f32>::init(PolicyConfig::default(), &mut stream(3, "init", 0)).unwrap();
    let mut rng = stream(3, "state", 0);
    for n in [1, 2, 7, 50, 200] {
        let (head, value, _) = forward(&p, &random_state(&mut rng, n, 1.0)).unwrap();
        assert_eq!(head.rows(), n);
        assert!(value.is_finite());
    }
}

#[test]
fn critic_gradient_ignores_row_order() {
    use dynopt_core::policy::backward;
    let p = policy(9);
    let mut rng = stream(9, "state", 0);
    let state = random_state(&mut rng, 6, 1.5);
    let reversed = StateMatrix { rows: state.rows.iter().rev().copied().collect() };
    let grad = |s: &StateMatrix| {
        let (head, _, cache) = forward(&p, s).unwrap();
        let zeros = vec![0.0; head.mu.len()];
        backward(&p, &cache, &zeros, &zeros, &[1.0]).unwrap()
    };
    let (a, b) = (grad(&state), grad(&reversed));
    let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(scale > 0.0);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9 * scale.max(1.0)));
}
