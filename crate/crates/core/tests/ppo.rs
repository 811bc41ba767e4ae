use dynopt_core::bench::{BaseFunction, Category, DynamicInstance, FunctionId, SubProblem};
use dynopt_core::mdp::{StateMatrix, N_FEATURES};
use dynopt_core::policy::{forward, forward_batch, PolicyConfig, PolicyParams};
use dynopt_core::ppo::{
    compute_advantages, evaluate_controller, evaluate_policy, meta_train, ppo_loss, ppo_update, Controller, Episode,
    PpoBatch, RolloutBuffer, TrainConfig, Transition, Wiring, FIXED_BASELINE,
};
use dynopt_core::policy::Adam;
use dynopt_core::bench::make_suite_with;
use dynopt_core::bench::SuiteParams;
use dynopt_core::rng::stream;
use dynopt_core::Objective;
use rand::Rng;

fn sphere(fe_max: usize, dim: usize) -> DynamicInstance {
    let base = BaseFunction::new(FunctionId::Sphere, vec![-5.0; dim], vec![5.0; dim], vec![1.0; dim]);
    DynamicInstance::frozen("sphere", SubProblem::single(base), fe_max)
}

fn small_cfg() -> TrainConfig {
    TrainConfig {
        population: 6,
        epochs: 1,
        batch: 2,
        ..TrainConfig::default()
    }
}

fn tiny_policy(seed: u64) -> PolicyParams<f32> {
    PolicyParams::init(PolicyConfig::tiny(8), &mut stream(seed, "init", 0)).unwrap()
}

fn random_state(rng: &mut impl Rng, n: usize) -> StateMatrix {
    StateMatrix {
        rows: (0..n)
            .map(|_| {
                let mut r = [0.0; N_FEATURES];
                r.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
                r
            })
            .collect(),
    }
}

#[test]
fn surrogate_gradient_matches_central_differences() {
    let cfg = TrainConfig::default();
    let mut p = PolicyParams::<f64>::init(PolicyConfig::tiny(8), &mut stream(7, "init", 0)).unwrap();
    let mut rng = stream(7, "probe", 0);
    let states: Vec<StateMatrix> = (0..2).map(|_| random_state(&mut rng, 3)).collect();
    let actions: Vec<Vec<f64>> = (0..2).map(|_| (0..9).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
    let refs: Vec<&StateMatrix> = states.iter().collect();
    let (out, _) = forward_batch(&p, &refs).unwrap();
    // first step inside the trust region, second one clipped
    let logp_old = vec![
        out.heads[0].log_prob_and_entropy(&actions[0]).0 - 0.05,
        out.heads[1].log_prob_and_entropy(&actions[1]).0 - 0.5,
    ];
    let batch = PpoBatch {
        states: refs.clone(),
        actions: actions.iter().map(|a| a.as_slice()).collect(),
        logp_old,
        advantages: vec![0.8, 1.3],
        returns: vec![0.4, -0.2],
    };
    let (parts, grad) = ppo_loss(&p, &batch, &cfg).unwrap();
    assert_eq!(parts.clip_fraction, 0.5);
    let h = 1e-4;
    for spec in p.specs().to_vec() {
        let mut diff = 0.0;
        let mut na = 0.0f64;
        let mut nn = 0.0f64;
        for i in spec.offset..spec.offset + spec.len {
            let orig = p.flat()[i];
            p.flat_mut()[i] = orig + h;
            let up = ppo_loss(&p, &batch, &cfg).unwrap().0.total;
            p.flat_mut()[i] = orig - h;
            let down = ppo_loss(&p, &batch, &cfg).unwrap().0.total;
            p.flat_mut()[i] = orig;
            let num = (up - down) / (2.0 * h);
            diff += (num - grad[i]).powi(2);
            na += grad[i] * grad[i];
            nn += num * num;
        }
        let scale = na.sqrt().max(nn.sqrt());
        if scale < 1e-7 {
            assert!(diff.sqrt() < 1e-7, "{}", spec.name);
        } else {
            assert!(diff.sqrt() / scale <= 1e-3, "{}: {}", spec.name, diff.sqrt() / scale);
        }
    }
}

#[test]
fn clipped_branch_uses_one_plus_epsilon() {
    let cfg = TrainConfig {
        entropy_coef: 0.0,
        ..TrainConfig::default()
    };
    let p = tiny_policy(1);
    let s = random_state(&mut stream(1, "s", 0), 4);
    let (head, value, _) = forward(&p, &s).unwrap();
    let a = head.mode();
    let lp = head.log_prob_and_entropy(&a).0;
    let batch = PpoBatch {
        states: vec![&s],
        actions: vec![&a],
        logp_old: vec![lp - 2f64.ln()],
        advantages: vec![1.0],
        returns: vec![value],
    };
    let (parts, grad) = ppo_loss(&p, &batch, &cfg).unwrap();
    assert!((parts.policy + 1.2).abs() < 1e-6, "{}", parts.policy);
    assert_eq!(parts.clip_fraction, 1.0);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn zero_advantage_and_entropy_leave_only_the_value_gradient() {
    let cfg = TrainConfig {
        entropy_coef: 0.0,
        value_coef: 0.0,
        ..TrainConfig::default()
    };
    let p = tiny_policy(2);
    let s = random_state(&mut stream(2, "s", 0), 3);
    let a = vec![0.3; 9];
    let batch = PpoBatch {
        states: vec![&s, &s],
        actions: vec![&a, &a],
        logp_old: vec![-1.0, 2.0],
        advantages: vec![0.0, 0.0],
        returns: vec![5.0, -5.0],
    };
    let (_, grad) = ppo_loss(&p, &batch, &cfg).unwrap();
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn one_step_charges_population_plus_archive() {
    let inst = sphere(2000, 4);
    let cfg = small_cfg();
    let p = tiny_policy(3);
    let mut ep = Episode::start(&inst, &cfg, Wiring::default(), 11).unwrap();
    let ctl = Controller::Policy { params: &p, greedy: false };
    let mut buf = RolloutBuffer::default();
    for k in 1..=8 {
        let before = ep.run.fe_used();
        ep.rollout_step(&ctl, Some(&mut buf)).unwrap();
        assert_eq!(ep.run.fe_used() - before, 6 + k.min(5));
    }
    assert_eq!(buf.len(), 8);
    assert!(buf.transitions.iter().all(|t| (0.0..=1.0).contains(&t.reward) && t.logp.is_finite()));
}

#[test]
fn stalled_generation_earns_nothing() {
    // w = c1 = c2 = 0 freezes every particle on a frozen landscape
    let inst = sphere(500, 3);
    let cfg = small_cfg();
    let mut ep = Episode::start(&inst, &cfg, Wiring::default(), 5).unwrap();
    let ctl = Controller::Fixed(dynopt_core::nbnc::Hyper::new(0.0, 0.0, 0.0));
    for _ in 0..5 {
        let t = ep.rollout_step(&ctl, None).unwrap();
        assert_eq!(t.reward, 0.0);
        assert_eq!(t.ratio, 1.0);
    }
}

#[test]
fn transitions_replay_identically() {
    let inst = sphere(800, 3);
    let cfg = small_cfg();
    let p = tiny_policy(4);
    let collect = || {
        let mut ep = Episode::start(&inst, &cfg, Wiring::default(), 99).unwrap();
        let mut buf = RolloutBuffer::default();
        let ctl = Controller::Policy { params: &p, greedy: false };
        while !ep.done {
            ep.rollout_step(&ctl, Some(&mut buf)).unwrap();
        }
        buf.transitions
    };
    let a: Vec<Transition> = collect();
    assert_eq!(a, collect());
    assert!(a.last().unwrap().done);
    assert!(a[..a.len() - 1].iter().all(|t| !t.done));
}

#[test]
fn episode_respects_budget() {
    let inst = sphere(1234, 3);
    let cfg = small_cfg();
    let s = dynopt_core::ppo::run_episode(&Controller::Fixed(FIXED_BASELINE), &inst, &cfg, Wiring::default(), 1).unwrap();
    assert!(s.fe_used <= 1234);
    assert!(1234 - s.fe_used < 6 + 5);
}

#[test]
fn first_inner_epoch_has_unit_ratio() {
    let inst = sphere(600, 3);
    let cfg = small_cfg();
    let mut p = PolicyParams::<f32>::init(PolicyConfig::default(), &mut stream(0, "init", 0)).unwrap();
    let mut ep = Episode::start(&inst, &cfg, Wiring::default(), 3).unwrap();
    let mut buf = RolloutBuffer::default();
    {
        let ctl = Controller::Policy { params: &p, greedy: false };
        for _ in 0..cfg.n_rollout {
            ep.rollout_step(&ctl, Some(&mut buf)).unwrap();
        }
    }
    let mut adam = Adam::new(cfg.lr, p.len());
    let stats = ppo_update(&mut p, &mut adam, &mut buf, 0.0, &cfg).unwrap();
    assert_eq!(stats.epochs.len(), cfg.k_epochs);
    assert_eq!(stats.epochs[0].max_ratio_dev, 0.0);
    assert_eq!(stats.epochs[0].clip_fraction, 0.0);
    assert!(buf.is_empty());
}

#[test]
fn gae_full_horizon_matches_direct_sum() {
    let tr = |r: f64, v: f64| Transition {
        state: StateMatrix { rows: vec![] },
        action: vec![],
        logp: 0.0,
        reward: r,
        value: v,
        done: false,
    };
    let b = [tr(0.1, 0.5), tr(0.4, 0.2), tr(0.3, 0.9)];
    let (a, _) = compute_advantages(&b, 1.0, 1.0, 0.7);
    let direct = 0.1 + 0.4 + 0.3 + 0.7 - 0.5;
    assert!((a[0] - direct).abs() < 1e-12);
}

#[test]
fn single_short_episode_triggers_one_update() {
    let cfg = TrainConfig {
        population: 6,
        epochs: 1,
        batch: 8,
        ..TrainConfig::default()
    };
    let inst = sphere(cfg.population * cfg.n_rollout, 3);
    let out = meta_train(tiny_policy(5), std::slice::from_ref(&inst), &cfg, Wiring::default(), 2).unwrap();
    assert!(out.updates >= 1 && out.updates <= 1, "{}", out.updates);
    assert_eq!(out.curve.len(), 1);
}

#[test]
fn training_is_deterministic_and_curve_is_complete() {
    let params = SuiteParams {
        dim: 3,
        fe_max: 400,
        n_train: 3,
        n_test: 1,
        ..SuiteParams::default()
    };
    let suite = make_suite_with(&params, 8);
    let cfg = TrainConfig {
        population: 6,
        epochs: 2,
        batch: 2,
        lr: 1e-3,
        ..TrainConfig::default()
    };
    let a = meta_train(tiny_policy(6), &suite.train, &cfg, Wiring::default(), 3).unwrap();
    let b = meta_train(tiny_policy(6), &suite.train, &cfg, Wiring::default(), 3).unwrap();
    assert_eq!(a.curve.len(), 2 * 3);
    assert_eq!(a.curve, b.curve);
    assert!(a.params.flat().iter().zip(b.params.flat()).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a.params, tiny_policy(6));
}

#[test]
fn untrained_policy_beats_random_search_on_noise_instances() {
    let params = SuiteParams {
        dim: 5,
        fe_max: 3000,
        n_train: 1,
        n_test: 8,
        ..SuiteParams::default()
    };
    let suite = make_suite_with(&params, 21);
    let inst = suite.test.iter().find(|i| i.category == Category::PureNoise).unwrap();
    let cfg = TrainConfig {
        population: 20,
        ..TrainConfig::default()
    };
    let p = PolicyParams::<f32>::init(PolicyConfig::default(), &mut stream(1, "init", 0)).unwrap();
    let below = (0..10)
        .filter(|&s| evaluate_policy(&p, inst, &cfg, Wiring::default(), s).unwrap().rp < 1.0)
        .count();
    assert!(below >= 7, "{below}/10");
    let a = evaluate_policy(&p, inst, &cfg, Wiring::default(), 4).unwrap();
    let b = evaluate_policy(&p, inst, &cfg, Wiring::default(), 4).unwrap();
    assert_eq!(a.e_off, b.e_off);
    let f = evaluate_controller(&Controller::Fixed(FIXED_BASELINE), inst, &cfg, Wiring::default(), 4).unwrap();
    assert!(f.rp.is_finite());
    assert!(inst.run(stream(0, "noise", 0)).fe_max() == 3000);
}

fn learning_signal(seed: u64) -> (f64, f64) {
    let inst = sphere(3_000, 5);
    let cfg = TrainConfig {
        population: 20,
        epochs: 5,
        batch: 1,
        ..TrainConfig::default()
    };
    let p = PolicyParams::<f32>::init(PolicyConfig::default(), &mut stream(seed, "init", 0)).unwrap();
    let out = meta_train(p, std::slice::from_ref(&inst), &cfg, Wiring::default(), seed).unwrap();
    (out.curve[0].ret, out.curve.last().unwrap().ret)
}

#[test]
fn training_raises_return_on_a_frozen_sphere() {
    let passed = (0..3)
        .filter(|&s| {
            let (first, last) = learning_signal(s);
            eprintln!("seed {s}: return {first:.4} -> {last:.4}");
            last > first
        })
        .count();
    assert!(passed >= 2, "{passed}/3 seeds improved");
}
