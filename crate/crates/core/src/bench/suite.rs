use alloc::format;

use rand::seq::SliceRandom;
use rand::Rng;

use super::functions::{BaseFunction, Blend, FunctionId, SubProblem};
use super::instance::{Category, DynamicInstance, NoiseSchedule, SwitchSchedule};
use crate::prelude::*;
use crate::rng::{derive_seed, stream, StreamRng};

/// Size and scale of a generated suite.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SuiteParams {
    pub dim: usize,
    pub fe_max: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            dim: 10,
            fe_max: 25_000,
            n_train: 64,
            n_test: 32,
            lower: -5.0,
            upper: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Suite {
    pub seed: u64,
    pub params: SuiteParams,
    pub train: Vec<DynamicInstance>,
    pub test: Vec<DynamicInstance>,
}

/// Reference category weights of the 32-instance test split (14/10/8).
const CATEGORY_WEIGHTS: [usize; 3] = [14, 10, 8];

/// Splits `n` instances across categories in 14:10:8 proportion using the
/// largest-remainder rule (ties go to the earlier category).
pub fn category_counts(n: usize) -> [usize; 3] {
    let total: usize = CATEGORY_WEIGHTS.iter().sum();
    let mut counts = [0; 3];
    let mut rems = [(0usize, 0usize); 3];
    for (i, w) in CATEGORY_WEIGHTS.iter().enumerate() {
        counts[i] = n * w / total;
        rems[i] = (n * w % total, i);
    }
    let mut left = n - counts.iter().sum::<usize>();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rems.iter() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// The default 64 train / 32 test suite.
pub fn make_suite(seed: u64) -> Suite {
    make_suite_with(&SuiteParams::default(), seed)
}

pub fn make_suite_with(params: &SuiteParams, seed: u64) -> Suite {
    let test = split(params, seed, false);
    let mut train = split(params, seed, true);
    // Shifts are continuous draws, so a clash is practically impossible; the
    // check keeps the disjointness guarantee unconditional.
    for (i, inst) in train.iter_mut().enumerate() {
        let mut salt = 0u64;
        while test.iter().any(|t| same_definition(t, inst)) {
            salt += 1;
            let mut rng = stream(seed, "suite-train-retry", (i as u64) << 32 | salt);
            *inst = generate(params, &mut rng, inst.category, true, inst.id.clone(), inst.seed ^ salt);
        }
    }
    Suite {
        seed,
        params: params.clone(),
        train,
        test,
    }
}

fn split(params: &SuiteParams, seed: u64, train: bool) -> Vec<DynamicInstance> {
    let n = if train { params.n_train } else { params.n_test };
    let label = if train { "suite-train" } else { "suite-test" };
    let counts = category_counts(n);
    let mut out = Vec::with_capacity(n);
    for (cat, &count) in Category::ALL.iter().zip(counts.iter()) {
        for _ in 0..count {
            let k = out.len();
            let id = if train {
                format!("t{}", k + 1)
            } else {
                format!("f{}", k + 1)
            };
            let mut rng = stream(seed, label, k as u64);
            let inst_seed = derive_seed(seed, label, k as u64);
            out.push(generate(params, &mut rng, *cat, train, id, inst_seed));
        }
    }
    out
}

fn same_definition(a: &DynamicInstance, b: &DynamicInstance) -> bool {
    a.category == b.category && a.switch == b.switch && a.noise == b.noise && a.sub_problems == b.sub_problems
}

fn generate(
    params: &SuiteParams,
    rng: &mut StreamRng,
    category: Category,
    allow_blend: bool,
    id: alloc::string::String,
    seed: u64,
) -> DynamicInstance {
    let n_sub = match category {
        Category::PureNoise => 1,
        Category::LandscapeSwitch => rng.random_range(2..=4),
        Category::Hybrid => rng.random_range(2..=3),
    };
    let mut ids = FunctionId::ALL.to_vec();
    ids.shuffle(rng);
    let lower = alloc::vec![params.lower; params.dim];
    let upper = alloc::vec![params.upper; params.dim];
    let span = 0.8 * (params.upper - params.lower) / 2.0;
    let mid = (params.upper + params.lower) / 2.0;
    let sub_problems = ids[..n_sub]
        .iter()
        .map(|&fid| {
            let shift = (0..params.dim)
                .map(|_| mid + rng.random_range(-span..span))
                .collect();
            let base = BaseFunction::new(fid, lower.clone(), upper.clone(), shift);
            let blend = if allow_blend && rng.random_bool(0.5) {
                let other = loop {
                    let o = FunctionId::ALL[rng.random_range(0..FunctionId::ALL.len())];
                    if o != fid {
                        break o;
                    }
                };
                Some(Blend {
                    id: other,
                    alpha: rng.random_range(0.2..0.8),
                })
            } else {
                None
            };
            SubProblem { base, blend }
        })
        .collect::<Vec<_>>();

    let mut order: Vec<usize> = (0..n_sub).collect();
    order.shuffle(rng);
    let divisor = [5usize, 8, 10, 16][rng.random_range(0..4)];
    let period_fe = (params.fe_max / divisor).max(1);

    let noise = match category {
        Category::LandscapeSwitch => NoiseSchedule::NONE,
        _ => NoiseSchedule {
            sigma0: 10f64.powf(rng.random_range(-2.0..0.0)),
            growth: rng.random_range(0.5..3.0),
        },
    };
    let switch = if n_sub == 1 {
        SwitchSchedule {
            period_fe,
            order: alloc::vec![0],
        }
    } else {
        SwitchSchedule { period_fe, order }
    };
    DynamicInstance {
        id,
        category,
        seed,
        fe_max: params.fe_max,
        switch,
        noise,
        sub_problems,
    }
}
