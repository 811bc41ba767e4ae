use alloc::vec::Vec;

use rand::Rng;

use super::instance::DynamicInstance;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

/// Points drawn at the start of every environment epoch.
pub const RANDOM_SAMPLES: usize = 100;

/// Offline error of a pseudo-optimizer that, at the start of each environment
/// epoch, draws [`RANDOM_SAMPLES`] uniform points and keeps the best of them
/// for the whole epoch.
pub fn random_baseline(instance: &DynamicInstance, seed: u64) -> f64 {
    let mut rng = stream(seed, "random-baseline", 0);
    random_baseline_over(
        &instance.epochs(),
        instance.lower(),
        instance.upper(),
        &mut rng,
        |x, fe, rng| {
            let obs = instance
                .evaluate_at(x, fe, rng)
                .expect("epoch starts lie inside the budget");
            (obs.value, obs.optimum)
        },
    )
}

/// Generic form of [`random_baseline`]; `observe(x, fe, rng)` returns the
/// observed value and the noiseless optimum at `fe`.
pub fn random_baseline_over<F>(
    epochs: &[(usize, usize)],
    lower: &[f64],
    upper: &[f64],
    rng: &mut StreamRng,
    mut observe: F,
) -> f64
where
    F: FnMut(&[f64], usize, &mut StreamRng) -> (f64, f64),
{
    let mut total = 0.0;
    let mut count = 0usize;
    let mut x: Vec<f64> = alloc::vec![0.0; lower.len()];
    for &(start, end) in epochs {
        let mut best = f64::INFINITY;
        let mut optimum = 0.0;
        for _ in 0..RANDOM_SAMPLES {
            for (xi, (l, u)) in x.iter_mut().zip(lower.iter().zip(upper)) {
                *xi = rng.random_range(*l..*u);
            }
            let (value, opt) = observe(&x, start, rng);
            optimum = opt;
            if value < best {
                best = value;
            }
        }
        total += (best - optimum).max(0.0) * (end - start) as f64;
        count += end - start;
    }
    total / count as f64
}

/// Offline error relative to random sampling; below 1 beats random search.
pub fn normalized_performance(e_off: f64, e_rand: f64) -> Result<f64> {
    if !(e_rand > 0.0) {
        return Err(Error::DegenerateBaseline);
    }
    Ok(e_off / e_rand)
}
