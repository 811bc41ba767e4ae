use crate::error::{Error, Result};
use crate::mdp::{map_actions, StateMatrix};
use crate::nbnc::{Hyper, HyperMatrix};
use crate::policy::{forward, PolicyParams};
use crate::prelude::*;
use crate::rng::StreamRng;

use super::config::Wiring;

/// Constriction-equivalent coefficients of the fixed-parameter baseline.
pub const FIXED_BASELINE: Hyper = Hyper::new(0.7298, 1.49618, 1.49618);

/// Source of per-particle coefficients.
#[derive(Debug, Clone, Copy)]
pub enum Controller<'a> {
    Fixed(Hyper),
    /// `greedy` acts with the Gaussian means instead of sampling.
    Policy { params: &'a PolicyParams<f32>, greedy: bool },
}

/// Coefficients for one generation, plus what training needs to remember.
#[derive(Debug, Clone)]
pub struct Decision {
    pub hyper: HyperMatrix,
    /// Pre-clip policy sample; `None` for fixed controllers.
    pub sample: Option<Vec<f64>>,
    pub logp: f64,
    pub value: f64,
}

impl Controller<'_> {
    pub fn decide(
        &self,
        state: &StateMatrix,
        wiring: &Wiring,
        generation: usize,
        t_max: f64,
        rng: &mut StreamRng,
    ) -> Result<Decision> {
        match *self {
            Controller::Fixed(h) => Ok(Decision {
                hyper: HyperMatrix::uniform(state.len(), h),
                sample: None,
                logp: 0.0,
                value: 0.0,
            }),
            Controller::Policy { params, greedy } => {
                if params.config().n_actions != wiring.action.width() {
                    return Err(Error::Shape {
                        expected: wiring.action.width(),
                        got: params.config().n_actions,
                    });
                }
                let (head, value, _) = forward(params, state)?;
                let (sample, logp) = if greedy {
                    let a = head.mode();
                    let lp = head.log_prob_and_entropy(&a).0;
                    (a, lp)
                } else {
                    head.sample_raw(rng)
                };
                let clipped: Vec<f64> = sample.iter().map(|a| a.clamp(0.0, 1.0)).collect();
                let hyper = map_actions(&clipped, wiring.action, &wiring.bounds, generation, t_max)?;
                Ok(Decision {
                    hyper,
                    sample: Some(sample),
                    logp,
                    value,
                })
            }
        }
    }
}
