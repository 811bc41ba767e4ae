use alloc::vec;

use super::params::PolicyParams;
use super::real::Real;
use crate::error::{Error, Result};
use crate::prelude::*;

/// Adam with bias correction; moments are kept in `f64`.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(lr: f64, n_params: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step<T: Real>(&mut self, params: &mut PolicyParams<T>, grad: &[T]) -> Result<()> {
        if grad.len() != self.m.len() || params.len() != self.m.len() {
            return Err(Error::Shape {
                expected: self.m.len(),
                got: grad.len(),
            });
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (i, p) in params.flat_mut().iter_mut().enumerate() {
            let g = grad[i].f64();
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let step = self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + self.eps);
            *p = T::of(p.f64() - step);
        }
        Ok(())
    }
}
