//! Replicated bias study over broken-window scenarios.
//!
//! Each replicate simulates one data pattern on the largest scenario horizon
//! and restricts it to every scenario (a renewal process restricted to a
//! shorter initial interval is the renewal process on that interval), then
//! estimates the rate naively or by Monte Carlo maximum likelihood.
//! Replicates run in parallel with independent derived seeds; aggregation is
//! ordered by replicate index, so parallelism never changes the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{split, BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::inference::mcml::McmlProblem;
use crate::inference::naive::naive_estimate;
use crate::renewal::ErlangModel;
use crate::samplers::ChainConfig;
use crate::seed::child_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Naive,
    Mcml,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasStudyConfig {
    pub true_lambda: f64,
    pub true_alpha: u32,
    pub scenarios: Vec<BrokenWindow>,
    pub replicates: u32,
    pub estimator: Estimator,
    pub chain: ChainConfig,
    pub newton_steps: u32,
    pub seed: u64,
}

impl BiasStudyConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidParameter("replicates must be >= 1".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::InvalidParameter("scenarios must be non-empty".into()));
        }
        Ok(())
    }
}

/// Per-scenario summary: mean and sample variance of the rate estimates over
/// the replicates that produced one, plus the number that failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub window: BrokenWindow,
    pub mean: f64,
    pub variance: f64,
    pub n_failed: u32,
    pub n_used: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasStudyResult {
    pub rows: Vec<ScenarioRow>,
}

/// Estimates for one replicate across all scenarios; `None` marks an
/// estimator failure (no observable interval, or a diverged Newton search).
fn replicate_estimates(
    config: &BiasStudyConfig,
    replicate: u32,
) -> Result<Vec<Option<f64>>> {
    let rep_seed = child_seed(config.seed, u64::from(replicate));
    let max_horizon = config
        .scenarios
        .iter()
        .map(BrokenWindow::t_end)
        .fold(0.0_f64, f64::max);
    let model = ErlangModel::new(config.true_lambda, config.true_alpha, max_horizon)?;
    let pattern = model.simulate(rep_seed);

    let mut out = Vec::with_capacity(config.scenarios.len());
    for (scenario_idx, window) in config.scenarios.iter().enumerate() {
        let restricted = OrderedConfig::new(
            pattern
                .times()
                .iter()
                .copied()
                .filter(|&t| t <= window.t_end())
                .collect(),
        )?;
        let parts = split(&restricted, window);
        let estimate = match config.estimator {
            Estimator::Naive => {
                match naive_estimate(&parts.left, &parts.right, Some(config.true_alpha)) {
                    Ok((rate, _)) => Some(rate),
                    Err(Error::NoObservableIntervals) => None,
                    Err(e) => return Err(e),
                }
            }
            Estimator::Mcml => {
                let problem = McmlProblem::new(
                    *window,
                    parts.left.clone(),
                    parts.right.clone(),
                    config.true_alpha,
                )?;
                let chain = config
                    .chain
                    .with_seed(child_seed(rep_seed, 1000 + scenario_idx as u64));
                match problem.fit(config.true_lambda, config.newton_steps, &chain) {
                    Ok(fit) => Some(fit.lambda_hat),
                    Err(Error::NewtonDiverged { .. }) => None,
                    Err(e) => return Err(e),
                }
            }
        };
        out.push(estimate);
    }
    Ok(out)
}

pub fn run_bias_study(config: &BiasStudyConfig) -> Result<BiasStudyResult> {
    config.validate()?;
    let per_replicate: Vec<Result<Vec<Option<f64>>>> = (0..config.replicates)
        .into_par_iter()
        .map(|rep| replicate_estimates(config, rep))
        .collect();

    let mut estimates: Vec<Vec<f64>> = vec![Vec::new(); config.scenarios.len()];
    let mut failures = vec![0_u32; config.scenarios.len()];
    for rep in per_replicate {
        let rep = rep?;
        for (idx, est) in rep.into_iter().enumerate() {
            match est {
                Some(v) => estimates[idx].push(v),
                None => failures[idx] += 1,
            }
        }
    }

    let rows = config
        .scenarios
        .iter()
        .zip(estimates.iter().zip(&failures))
        .map(|(window, (vals, &n_failed))| {
            let n = vals.len();
            let mean = if n > 0 {
                vals.iter().sum::<f64>() / n as f64
            } else {
                f64::NAN
            };
            let variance = if n > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)
            } else {
                f64::NAN
            };
            ScenarioRow {
                window: *window,
                mean,
                variance,
                n_failed,
                n_used: n as u32,
            }
        })
        .collect();
    Ok(BiasStudyResult { rows })
}
