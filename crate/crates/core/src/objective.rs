use crate::error::{Error, Result};
use crate::prelude::*;

/// A minimization problem with a finite evaluation budget.
///
/// Evaluations past the budget fail with [`Error::BudgetExhausted`], which
/// is how optimizers learn that a run is over.
pub trait Objective {
    fn dim(&self) -> usize;
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;
    fn fe_used(&self) -> usize;
    fn fe_max(&self) -> usize;

    fn remaining(&self) -> usize {
        self.fe_max().saturating_sub(self.fe_used())
    }

    /// Euclidean length of the search box diagonal.
    fn diameter(&self) -> f64 {
        self.lower()
            .iter()
            .zip(self.upper())
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }
}

/// Evaluation counter with a hard cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub used: usize,
    pub max: usize,
}

impl Budget {
    pub fn new(max: usize) -> Self {
        Self { used: 0, max }
    }

    /// Charges one evaluation, returning the index of the charged evaluation.
    pub fn charge(&mut self) -> Result<usize> {
        if self.used >= self.max {
            return Err(Error::BudgetExhausted { fe_max: self.max });
        }
        self.used += 1;
        Ok(self.used - 1)
    }

    pub fn remaining(&self) -> usize {
        self.max - self.used
    }
}

/// An [`Objective`] backed by a closure `f(x, fe)` over a box, where `fe` is
/// the zero-based index of the evaluation being charged.
pub struct FnObjective<F> {
    lower: Vec<f64>,
    upper: Vec<f64>,
    budget: Budget,
    f: F,
}

impl<F: FnMut(&[f64], usize) -> f64> FnObjective<F> {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, fe_max: usize, f: F) -> Self {
        Self {
            lower,
            upper,
            budget: Budget::new(fe_max),
            f,
        }
    }

    /// Resets the evaluation counter.
    pub fn reset_budget(&mut self, fe_max: usize) {
        self.budget = Budget::new(fe_max);
    }
}

impl<F: FnMut(&[f64], usize) -> f64> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let fe = self.budget.charge()?;
        Ok((self.f)(x, fe))
    }

    fn fe_used(&self) -> usize {
        self.budget.used
    }

    fn fe_max(&self) -> usize {
        self.budget.max
    }
}
