use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::functions::SubProblem;
use super::ledger::EvaluationLedger;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::StreamRng;

/// Periodic, cyclic switching between sub-problems.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwitchSchedule {
    pub period_fe: usize,
    pub order: Vec<usize>,
}

impl SwitchSchedule {
    pub fn fixed() -> Self {
        Self {
            period_fe: usize::MAX,
            order: alloc::vec![0],
        }
    }

    pub fn index_at(&self, fe: usize) -> usize {
        self.order[(fe / self.period_fe) % self.order.len()]
    }
}

/// Gaussian fitness noise whose deviation grows linearly with spent budget.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSchedule {
    pub sigma0: f64,
    pub growth: f64,
}

impl NoiseSchedule {
    pub const NONE: NoiseSchedule = NoiseSchedule {
        sigma0: 0.0,
        growth: 0.0,
    };

    pub fn sigma(&self, fe: usize, fe_max: usize) -> f64 {
        self.sigma0 * (1.0 + self.growth * fe as f64 / fe_max as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Category {
    PureNoise,
    LandscapeSwitch,
    Hybrid,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::PureNoise, Category::LandscapeSwitch, Category::Hybrid];
}

/// One fitness observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// What the optimizer sees.
    pub value: f64,
    /// Minimum of the active sub-problem, without noise.
    pub optimum: f64,
    pub active: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DynamicInstance {
    pub id: String,
    pub category: Category,
    pub seed: u64,
    pub fe_max: usize,
    pub switch: SwitchSchedule,
    pub noise: NoiseSchedule,
    pub sub_problems: Vec<SubProblem>,
}

impl DynamicInstance {
    /// A single noiseless landscape that never changes.
    pub fn frozen(id: &str, sub_problem: SubProblem, fe_max: usize) -> Self {
        Self {
            id: String::from(id),
            category: Category::PureNoise,
            seed: 0,
            fe_max,
            switch: SwitchSchedule::fixed(),
            noise: NoiseSchedule::NONE,
            sub_problems: alloc::vec![sub_problem],
        }
    }

    pub fn dim(&self) -> usize {
        self.sub_problems[0].base.dim()
    }

    pub fn lower(&self) -> &[f64] {
        &self.sub_problems[0].base.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.sub_problems[0].base.upper
    }

    /// Index of the sub-problem that defines fitness at evaluation `fe`.
    pub fn active_index(&self, fe: usize) -> Result<usize> {
        if fe >= self.fe_max {
            return Err(Error::FeOutOfRange {
                fe,
                fe_max: self.fe_max,
            });
        }
        Ok(self.switch.index_at(fe))
    }

    pub fn sigma(&self, fe: usize) -> f64 {
        self.noise.sigma(fe, self.fe_max)
    }

    /// Noise-free value of `x` under the environment active at `fe`.
    pub fn noiseless(&self, x: &[f64], fe: usize) -> Result<f64> {
        Ok(self.sub_problems[self.active_index(fe)?].evaluate(x))
    }

    /// Observes `x` at evaluation index `fe`. Noise is drawn from `rng` only
    /// when the deviation is positive, so noiseless instances are pure.
    pub fn evaluate_at(&self, x: &[f64], fe: usize, rng: &mut StreamRng) -> Result<Observation> {
        let active = self.active_index(fe).map_err(|_| Error::BudgetExhausted {
            fe_max: self.fe_max,
        })?;
        let sub = &self.sub_problems[active];
        let mut value = sub.evaluate(x);
        let sigma = self.sigma(fe);
        if sigma > 0.0 {
            let eta: f64 = rng.sample(StandardNormal);
            value += sigma * eta;
        }
        Ok(Observation {
            value,
            optimum: sub.optimum_value(),
            active,
        })
    }

    /// Half-open evaluation ranges over which the active sub-problem is constant.
    pub fn epochs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        let mut active = self.switch.index_at(0);
        let mut fe = self.switch.period_fe;
        while fe < self.fe_max {
            let next = self.switch.index_at(fe);
            if next != active {
                out.push((start, fe));
                start = fe;
                active = next;
            }
            fe = fe.saturating_add(self.switch.period_fe);
        }
        out.push((start, self.fe_max));
        out
    }

    /// Checks the category and schedule invariants.
    pub fn validate(&self) -> Result<()> {
        if self.sub_problems.is_empty() {
            return Err(Error::Config("instance has no sub-problems"));
        }
        if self.fe_max == 0 || self.switch.period_fe == 0 || self.switch.order.is_empty() {
            return Err(Error::Config("empty budget or schedule"));
        }
        if self.switch.order.iter().any(|&i| i >= self.sub_problems.len()) {
            return Err(Error::Config("switch order refers to a missing sub-problem"));
        }
        let d = self.dim();
        if self
            .sub_problems
            .iter()
            .any(|s| !s.base.is_valid() || s.base.dim() != d || s.base.lower != self.lower() || s.base.upper != self.upper())
        {
            return Err(Error::Config("sub-problems disagree on the search box"));
        }
        if self.noise.sigma0 < 0.0 || self.noise.growth < 0.0 {
            return Err(Error::Config("negative noise parameters"));
        }
        let n = self.sub_problems.len();
        let ok = match self.category {
            Category::PureNoise => n == 1,
            Category::LandscapeSwitch => n >= 2 && self.noise.sigma0 == 0.0,
            Category::Hybrid => n >= 2 && self.noise.sigma0 > 0.0,
        };
        if !ok {
            return Err(Error::Config("category invariant violated"));
        }
        Ok(())
    }

    /// Starts a scored run on this instance.
    pub fn run(&self, noise_rng: StreamRng) -> DynamicRun<'_> {
        DynamicRun {
            instance: self,
            ledger: EvaluationLedger::default(),
            rng: noise_rng,
            last_active: None,
        }
    }
}

/// A single optimizer run on an instance: counts evaluations, injects noise
/// and accumulates offline error.
#[derive(Debug, Clone)]
pub struct DynamicRun<'a> {
    pub instance: &'a DynamicInstance,
    pub ledger: EvaluationLedger,
    rng: StreamRng,
    last_active: Option<usize>,
}

impl DynamicRun<'_> {
    pub fn keep_trace(mut self) -> Self {
        self.ledger.trace = Some(Vec::new());
        self
    }
}

impl Objective for DynamicRun<'_> {
    fn dim(&self) -> usize {
        self.instance.dim()
    }

    fn lower(&self) -> &[f64] {
        self.instance.lower()
    }

    fn upper(&self) -> &[f64] {
        self.instance.upper()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let fe = self.ledger.fe_used;
        let obs = self.instance.evaluate_at(x, fe, &mut self.rng)?;
        let transition = self.last_active.is_some_and(|a| a != obs.active);
        self.last_active = Some(obs.active);
        self.ledger.record(obs.value, obs.optimum, transition);
        Ok(obs.value)
    }

    fn fe_used(&self) -> usize {
        self.ledger.fe_used
    }

    fn fe_max(&self) -> usize {
        self.instance.fe_max
    }
}
