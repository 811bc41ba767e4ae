use core::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::prelude::*;
use crate::rng::StreamRng;

pub const SIGMA_MIN: f64 = 1e-3;
pub const SIGMA_MAX: f64 = 0.7;

/// Independent Normal per particle and coefficient, row-major `N x M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianHead {
    pub n_actions: usize,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// `0.5 * ln(2 pi)`
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

impl GaussianHead {
    pub fn rows(&self) -> usize {
        self.mu.len() / self.n_actions
    }

    /// Draws `a ~ N(mu, sigma)` and clips to `[0, 1]`. The log-probability is
    /// that of the pre-clip draw.
    pub fn sample(&self, rng: &mut StreamRng) -> (Vec<f64>, f64) {
        let (mut a, logp) = self.sample_raw(rng);
        a.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
        (a, logp)
    }

    /// Unclipped draw and its log-probability.
    pub fn sample_raw(&self, rng: &mut StreamRng) -> (Vec<f64>, f64) {
        let mut a = Vec::with_capacity(self.mu.len());
        let mut logp = 0.0;
        for (&mu, &sigma) in self.mu.iter().zip(&self.sigma) {
            let z: f64 = rng.sample(StandardNormal);
            let x = mu + sigma * z;
            logp += log_density(x, mu, sigma);
            a.push(x);
        }
        (a, logp)
    }

    /// Deterministic action used at evaluation time.
    pub fn mode(&self) -> Vec<f64> {
        self.mu.clone()
    }

    /// Joint log-density of `a` and the summed entropy.
    pub fn log_prob_and_entropy(&self, a: &[f64]) -> (f64, f64) {
        let logp = a
            .iter()
            .zip(self.mu.iter().zip(&self.sigma))
            .map(|(&x, (&mu, &sigma))| log_density(x, mu, sigma))
            .sum();
        (logp, self.entropy())
    }

    pub fn entropy(&self) -> f64 {
        self.sigma.iter().map(|&s| 0.5 + HALF_LN_2PI + s.ln()).sum()
    }

    /// Adds `scale * d logp / d(mu, sigma)` into the given buffers.
    pub fn log_prob_grad(&self, a: &[f64], scale: f64, d_mu: &mut [f64], d_sigma: &mut [f64]) {
        for i in 0..self.mu.len() {
            let (mu, s) = (self.mu[i], self.sigma[i]);
            let z = (a[i] - mu) / s;
            d_mu[i] += scale * z / s;
            d_sigma[i] += scale * (z * z - 1.0) / s;
        }
    }

    /// Adds `scale * d entropy / d sigma` into `d_sigma`.
    pub fn entropy_grad(&self, scale: f64, d_sigma: &mut [f64]) {
        for (d, &s) in d_sigma.iter_mut().zip(&self.sigma) {
            *d += scale / s;
        }
    }
}

pub fn log_density(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - sigma.ln() - HALF_LN_2PI
}

/// Entropy gained by scaling every sigma by two.
pub fn doubling_entropy_gain(terms: usize) -> f64 {
    terms as f64 * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use alloc::vec;
    use core::f64::consts::PI;

    fn head(mu: f64, sigma: f64, n: usize) -> GaussianHead {
        GaussianHead {
            n_actions: 3,
            mu: vec![mu; 3 * n],
            sigma: vec![sigma; 3 * n],
        }
    }

    #[test]
    fn half_log_two_pi() {
        assert!((HALF_LN_2PI - 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn mode_density() {
        let h = head(0.4, 0.2, 2);
        let (lp, _) = h.log_prob_and_entropy(&h.mu);
        let per = -(0.2 * (2.0 * PI).sqrt()).ln();
        assert!((lp - 6.0 * per).abs() < 1e-12);
    }

    #[test]
    fn doubling_sigma_adds_log_two_per_term() {
        let a = head(0.5, 0.1, 4);
        let b = head(0.5, 0.2, 4);
        assert!((b.entropy() - a.entropy() - doubling_entropy_gain(12)).abs() < 1e-12);
    }

    #[test]
    fn floor_sigma_concentrates_samples() {
        let h = head(0.5, SIGMA_MIN, 100);
        let mut rng = stream(3, "action", 0);
        let (a, lp) = h.sample(&mut rng);
        assert!(lp.is_finite());
        let close = a.iter().filter(|&&x| (x - 0.5).abs() < 0.01).count();
        assert!(close as f64 >= 0.99 * a.len() as f64);
    }

    #[test]
    fn samples_are_clipped() {
        let h = head(0.98, 0.7, 50);
        let (a, _) = h.sample(&mut stream(1, "action", 0));
        assert!(a.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(a.iter().any(|&x| x == 1.0));
    }
}
