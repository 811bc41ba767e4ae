//! Non-stationary benchmark instances and run scoring.

mod baseline;
mod functions;
mod instance;
mod ledger;
mod suite;

pub use baseline::{normalized_performance, random_baseline, random_baseline_over, RANDOM_SAMPLES};
pub use functions::{BaseFunction, Blend, FunctionId, SubProblem};
pub use instance::{Category, DynamicInstance, DynamicRun, NoiseSchedule, Observation, SwitchSchedule};
pub use ledger::{offline_error, EvaluationLedger};
pub use suite::{category_counts, make_suite, make_suite_with, Suite, SuiteParams};
