use crate::error::{Error, Result};
use crate::nbnc::{Hyper, HyperMatrix};
use crate::prelude::*;

/// Lower and upper bounds of `(w, c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct HyperBounds {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl Default for HyperBounds {
    fn default() -> Self {
        Self {
            lower: [0.0, 0.0, 0.0],
            upper: [1.0, 4.1, 4.1],
        }
    }
}

impl HyperBounds {
    pub fn validate(&self) -> Result<()> {
        if self.lower.iter().zip(&self.upper).all(|(l, u)| l < u) {
            Ok(())
        } else {
            Err(Error::Config("hyper-parameter bounds need lower < upper"))
        }
    }

    fn map(&self, k: usize, a: f64) -> f64 {
        (self.upper[k] - self.lower[k]) * a + self.lower[k]
    }
}

/// Which coefficients the policy controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ActionSpace {
    /// `(w, c1, c2)` per particle.
    #[default]
    Full,
    /// `(c1, c2)`; `w` decays linearly from 0.9 to 0.4 over the run.
    Acceleration,
    /// `w` only; `c1 = c2 = 2.05`.
    Inertia,
}

/// Acceleration coefficients used when only the inertia weight is learned.
pub const FIXED_ACCELERATION: f64 = 2.05;

/// Inertia schedule used when only the acceleration coefficients are learned.
pub fn linear_decay_inertia(generation: usize, t_max: f64) -> f64 {
    0.9 - 0.5 * (generation as f64 / t_max).min(1.0)
}

impl ActionSpace {
    pub fn width(self) -> usize {
        match self {
            ActionSpace::Full => 3,
            ActionSpace::Acceleration => 2,
            ActionSpace::Inertia => 1,
        }
    }
}

fn check_unit(actions: &[f64], width: usize) -> Result<()> {
    for (idx, &a) in actions.iter().enumerate() {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::ActionOutOfRange {
                row: idx / width,
                col: idx % width,
                value: a,
            });
        }
    }
    Ok(())
}

/// Affine map of unit actions onto the coefficient box, row by row.
pub fn map_action(actions: &[[f64; 3]], bounds: &HyperBounds) -> Result<HyperMatrix> {
    let flat: Vec<f64> = actions.iter().flat_map(|r| r.iter().copied()).collect();
    map_actions(&flat, ActionSpace::Full, bounds, 0, 1.0)
}

/// General form of [`map_action`] for any [`ActionSpace`]. `actions` is
/// row-major with `space.width()` columns.
pub fn map_actions(
    actions: &[f64],
    space: ActionSpace,
    bounds: &HyperBounds,
    generation: usize,
    t_max: f64,
) -> Result<HyperMatrix> {
    let m = space.width();
    if actions.len() % m != 0 {
        return Err(Error::Shape {
            expected: m,
            got: actions.len() % m,
        });
    }
    check_unit(actions, m)?;
    let rows = actions
        .chunks(m)
        .map(|a| match space {
            ActionSpace::Full => Hyper::new(bounds.map(0, a[0]), bounds.map(1, a[1]), bounds.map(2, a[2])),
            ActionSpace::Acceleration => Hyper::new(
                linear_decay_inertia(generation, t_max),
                bounds.map(1, a[0]),
                bounds.map(2, a[1]),
            ),
            ActionSpace::Inertia => Hyper::new(bounds.map(0, a[0]), FIXED_ACCELERATION, FIXED_ACCELERATION),
        })
        .collect();
    Ok(HyperMatrix(rows))
}
