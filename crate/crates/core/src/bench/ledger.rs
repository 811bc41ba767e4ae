use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Running offline-error bookkeeping for one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationLedger {
    pub fe_used: usize,
    pub error_sum: f64,
    /// Best observed fitness since the last environment transition.
    pub best_so_far: Option<f64>,
    /// Per-evaluation errors, kept only when requested.
    pub trace: Option<Vec<f64>>,
}

impl EvaluationLedger {
    /// Records one observation. `transition` marks the first evaluation of a
    /// new environment, which discards the previous best.
    pub fn record(&mut self, observed: f64, optimum: f64, transition: bool) {
        if transition {
            self.best_so_far = None;
        }
        let best = match self.best_so_far {
            Some(b) if b <= observed => b,
            _ => observed,
        };
        self.best_so_far = Some(best);
        let err = (best - optimum).max(0.0);
        self.error_sum += err;
        self.fe_used += 1;
        if let Some(t) = self.trace.as_mut() {
            t.push(err);
        }
    }
}

/// Mean gap between the best-so-far and the true optimum over all recorded
/// evaluations.
pub fn offline_error(ledger: &EvaluationLedger) -> Result<f64> {
    if ledger.fe_used == 0 {
        return Err(Error::EmptyLedger);
    }
    Ok(ledger.error_sum / ledger.fe_used as f64)
}
