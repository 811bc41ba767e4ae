//! Classical test functions, shifted so that the minimum sits at a chosen
//! offset with a known value.

use core::f64::consts::{E, PI};

use crate::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FunctionId {
    Sphere,
    Ackley,
    Rastrigin,
    Griewank,
    Rosenbrock,
    Schwefel222,
    Levy,
    HappyCat,
}

impl FunctionId {
    pub const ALL: [FunctionId; 8] = [
        FunctionId::Sphere,
        FunctionId::Ackley,
        FunctionId::Rastrigin,
        FunctionId::Griewank,
        FunctionId::Rosenbrock,
        FunctionId::Schwefel222,
        FunctionId::Levy,
        FunctionId::HappyCat,
    ];

    /// Value at offset `z` from the optimum. Non-negative, zero only at `z = 0`.
    pub fn raw(self, z: &[f64]) -> f64 {
        let d = z.len() as f64;
        let v = match self {
            FunctionId::Sphere => z.iter().map(|v| v * v).sum(),
            FunctionId::Ackley => {
                let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                // Grouped so the optimum evaluates to exactly 0.
                (20.0 - 20.0 * (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
            }
            FunctionId::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            FunctionId::Griewank => {
                let s = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product::<f64>();
                1.0 + s - p
            }
            FunctionId::Rosenbrock => {
                // y = z + 1 puts the minimum at z = 0.
                z.windows(2)
                    .map(|w| {
                        let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                        100.0 * (b - a * a).powi(2) + (a - 1.0).powi(2)
                    })
                    .sum()
            }
            FunctionId::Schwefel222 => {
                let s = z.iter().map(|v| v.abs()).sum::<f64>();
                let p = z.iter().map(|v| v.abs()).product::<f64>();
                s + p
            }
            FunctionId::Levy => {
                let w: Vec<f64> = z.iter().map(|v| 1.0 + v / 4.0).collect();
                let n = w.len();
                let head = (PI * w[0]).sin().powi(2);
                let mid: f64 = w[..n - 1]
                    .iter()
                    .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
                    .sum();
                let wl = w[n - 1];
                let tail = (wl - 1.0).powi(2) * (1.0 + (2.0 * PI * wl).sin().powi(2));
                head + mid + tail
            }
            FunctionId::HappyCat => {
                // y = z - 1 puts the minimum at z = 0.
                let r: f64 = z.iter().map(|v| (v - 1.0) * (v - 1.0)).sum();
                let s: f64 = z.iter().map(|v| v - 1.0).sum();
                (r - d).abs().powf(0.25) + (0.5 * r + s) / d + 0.5
            }
        };
        v.max(0.0)
    }
}

/// A test function on a box, shifted to `shift`, with minimum `optimum_value`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaseFunction {
    pub id: FunctionId,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub shift: Vec<f64>,
    pub optimum_value: f64,
}

impl BaseFunction {
    pub fn new(id: FunctionId, lower: Vec<f64>, upper: Vec<f64>, shift: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        debug_assert_eq!(lower.len(), shift.len());
        Self {
            id,
            lower,
            upper,
            shift,
            optimum_value: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    fn offset(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(a, b)| a - b).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.id.raw(&self.offset(x)) + self.optimum_value
    }

    /// Whether bounds are well formed and the shift lies inside them.
    pub fn is_valid(&self) -> bool {
        self.lower.len() == self.dim()
            && self.upper.len() == self.dim()
            && self
                .lower
                .iter()
                .zip(&self.upper)
                .zip(&self.shift)
                .all(|((l, u), s)| l < u && l <= s && s <= u)
    }
}

/// Second component of a weighted composition; shares the base function's
/// box and shift so the composed optimum stays known.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Blend {
    pub id: FunctionId,
    /// Weight of the base component; the blend gets `1 - alpha`.
    pub alpha: f64,
}

/// One landscape an instance can switch to.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubProblem {
    pub base: BaseFunction,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub blend: Option<Blend>,
}

impl SubProblem {
    pub fn single(base: BaseFunction) -> Self {
        Self { base, blend: None }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self.blend {
            None => self.base.evaluate(x),
            Some(Blend { id, alpha }) => {
                let z = self.base.offset(x);
                alpha * self.base.id.raw(&z) + (1.0 - alpha) * id.raw(&z) + self.base.optimum_value
            }
        }
    }

    pub fn optimum_value(&self) -> f64 {
        self.base.optimum_value
    }

    pub fn optimum(&self) -> &[f64] {
        &self.base.shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    
    fn boxed(id: FunctionId, shift: Vec<f64>) -> BaseFunction {
        let d = shift.len();
        BaseFunction::new(id, vec![-5.0; d], vec![5.0; d], shift)
    }

    #[test]
    fn every_function_hits_its_optimum_at_the_shift() {
        let shift = vec![1.25, -3.5, 0.75, 2.0, -0.5];
        for id in FunctionId::ALL {
            let f = boxed(id, shift.clone());
            let at = f.evaluate(&shift);
            assert!(at.abs() < 1e-12, "{id:?} -> {at}");
            let off: Vec<f64> = shift.iter().map(|s| s + 0.3).collect();
            assert!(f.evaluate(&off) > at, "{id:?} not minimal at shift");
        }
    }

    #[test]
    fn sphere_of_ones_in_ten_dims_is_ten() {
        let f = boxed(FunctionId::Sphere, vec![0.0; 10]);
        assert_eq!(f.evaluate(&[1.0; 10]), 10.0);
        assert_eq!(f.evaluate(&[0.0; 10]), 0.0);
    }

    #[test]
    fn blend_is_a_convex_combination_with_shared_optimum() {
        let base = boxed(FunctionId::Sphere, vec![0.5, -0.5]);
        let sp = SubProblem {
            base: base.clone(),
            blend: Some(Blend {
                id: FunctionId::Rastrigin,
                alpha: 0.25,
            }),
        };
        let x = [1.0, 2.0];
        let z = [0.5, 2.5];
        let want = 0.25 * FunctionId::Sphere.raw(&z) + 0.75 * FunctionId::Rastrigin.raw(&z);
        assert!((sp.evaluate(&x) - want).abs() < 1e-12);
        assert_eq!(sp.evaluate(&[0.5, -0.5]), 0.0);
    }

    #[test]
    fn shift_must_lie_inside_bounds() {
        assert!(boxed(FunctionId::Levy, vec![4.9]).is_valid());
        assert!(!boxed(FunctionId::Levy, vec![5.1]).is_valid());
    }
}
