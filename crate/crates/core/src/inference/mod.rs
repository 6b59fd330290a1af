//! Parameter estimation for the broken-window renewal model: the naive
//! fully-observed-interval estimator, Monte Carlo maximum likelihood, and
//! the replicated bias study driving both.

mod mcml;
mod naive;
mod study;

pub use mcml::{CompletedStats, McmlProblem, McmlResult};
pub use naive::{naive_estimate, observable_intervals, PROFILE_SHAPE_MAX};
pub use study::{run_bias_study, BiasStudyConfig, BiasStudyResult, Estimator, ScenarioRow};
