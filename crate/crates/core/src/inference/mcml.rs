//! Monte Carlo maximum likelihood for the broken-window renewal model.
//!
//! The observed-data log likelihood ratio against a reference rate is an
//! expectation over the conditional law of the hidden points; replacing it
//! by an average over conditional samples gives the Monte Carlo surface
//! `L_N(λ) = ln[(1/N) Σ_i f_λ(left‖U_i‖right)/f_{λ0}(left‖U_i‖right)]`,
//! evaluated through the Erlang sufficient statistic. Derivatives follow by
//! self-normalised importance weighting, driving a Newton search for both
//! the reference rate (with fresh conditional samples each step) and the
//! final maximiser.

use serde::{Deserialize, Serialize};

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, LogSumExp};
use crate::renewal::ErlangModel;
use crate::samplers::{run_mh, ChainConfig, RenewalGapTarget};
use crate::seed::child_seed;

/// Sufficient statistic of a completed configuration: total count and
/// backward recurrence time of `left ‖ gap ‖ right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedStats {
    pub n: usize,
    pub backward: f64,
}

/// Monte Carlo likelihood machinery for one observed data set.
#[derive(Debug, Clone)]
pub struct McmlProblem {
    window: BrokenWindow,
    left: OrderedConfig,
    right: OrderedConfig,
    shape: u32,
}

/// Result of a full Monte Carlo maximum likelihood fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McmlResult {
    pub lambda_hat: f64,
    pub mc_inverse_fisher: f64,
    pub lambda0: f64,
    pub n_samples: u64,
    /// Sampled likelihood-ratio surface `(λ, L_N(λ))`, containing the
    /// maximiser; its maximum is attained at `lambda_hat`.
    pub llr_curve: Vec<(f64, f64)>,
}

impl McmlProblem {
    pub fn new(
        window: BrokenWindow,
        left: OrderedConfig,
        right: OrderedConfig,
        shape: u32,
    ) -> Result<Self> {
        if shape < 1 {
            return Err(Error::InvalidParameter("shape must be >= 1".into()));
        }
        if left.last().is_some_and(|t| t > window.t1())
            || right.first().is_some_and(|t| t < window.t2())
            || left.first().is_some_and(|t| t <= 0.0)
            || right.last().is_some_and(|t| t > window.t_end())
        {
            return Err(Error::InvalidData(
                "observed points must lie in [0,t1] ∪ [t2,t_end]".into(),
            ));
        }
        Ok(Self {
            window,
            left,
            right,
            shape,
        })
    }

    pub fn window(&self) -> &BrokenWindow {
        &self.window
    }

    fn model_at(&self, rate: f64) -> Result<ErlangModel> {
        ErlangModel::new(rate, self.shape, self.window.t_end())
    }

    /// Sufficient statistic of the completion `left ‖ gap ‖ right`.
    pub fn completed_stats(&self, gap: &OrderedConfig) -> CompletedStats {
        let horizon = self.window.t_end();
        let last = self
            .right
            .last()
            .or(gap.last())
            .or(self.left.last());
        let n = self.left.len() + gap.len() + self.right.len();
        match last {
            Some(t) => CompletedStats {
                n,
                backward: horizon - t,
            },
            None => CompletedStats {
                n: 0,
                backward: horizon,
            },
        }
    }

    /// Draw conditional gap samples under `rate` with the given chain
    /// protocol, reduced to their sufficient statistics.
    pub fn conditional_stats(&self, rate: f64, chain: &ChainConfig) -> Result<Vec<CompletedStats>> {
        let model = self.model_at(rate)?;
        let target = RenewalGapTarget::new(model, self.window, &self.left, &self.right)?;
        Ok(run_mh(&target, chain)
            .iter()
            .map(|gap| self.completed_stats(gap))
            .collect())
    }

    /// `L_N(λ)` against the reference `λ0` from completed-data ratios.
    /// Exactly zero at `λ = λ0`.
    pub fn log_likelihood_ratio(
        &self,
        rate: f64,
        rate0: f64,
        samples: &[CompletedStats],
    ) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("no conditional samples".into()));
        }
        let theta = self.model_at(rate)?;
        let theta0 = self.model_at(rate0)?;
        let logs: Vec<f64> = samples
            .iter()
            .map(|s| theta.log_likelihood_ratio_from_stats(&theta0, s.n, s.backward))
            .collect();
        Ok(log_sum_exp(&logs) - (samples.len() as f64).ln())
    }

    /// First derivative of `L_N` and the Monte Carlo Fisher information
    /// (negative second derivative) at `rate`, for samples drawn under
    /// `rate0`.
    pub fn score_and_fisher(
        &self,
        rate: f64,
        rate0: f64,
        samples: &[CompletedStats],
    ) -> Result<(f64, f64)> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("no conditional samples".into()));
        }
        let theta = self.model_at(rate)?;
        let theta0 = self.model_at(rate0)?;
        let mut lse = LogSumExp::new();
        let logs: Vec<f64> = samples
            .iter()
            .map(|s| {
                let g = theta.log_likelihood_ratio_from_stats(&theta0, s.n, s.backward);
                lse.add(g);
                g
            })
            .collect();
        let total = lse.value();
        let mut score = 0.0;
        let mut curvature = 0.0;
        let mut weighted_sq = 0.0;
        for (s, g) in samples.iter().zip(&logs) {
            let w = (g - total).exp();
            let (d1, d2) = theta.log_density_rate_derivs(s.n, s.backward);
            score += w * d1;
            curvature += w * d2;
            weighted_sq += w * d1 * d1;
        }
        let second = curvature + weighted_sq - score * score;
        Ok((score, -second))
    }

    /// Newton-Raphson search for a reference rate, resampling the hidden
    /// points under the current iterate at every step (fresh seed per step,
    /// derived from the chain seed).
    pub fn newton_reference(&self, start: f64, steps: u32, chain: &ChainConfig) -> Result<f64> {
        if steps < 1 {
            return Err(Error::InvalidParameter("need at least one Newton step".into()));
        }
        let mut rate = start;
        for step in 0..steps {
            let step_chain = chain.with_seed(child_seed(chain.seed, u64::from(step)));
            let samples = self.conditional_stats(rate, &step_chain)?;
            let (score, fisher) = self.score_and_fisher(rate, rate, &samples)?;
            let delta = if fisher > 0.0 {
                score / fisher
            } else {
                // non-positive MC curvature: bounded uphill step
                (score / fisher.abs().max(f64::MIN_POSITIVE)).clamp(-0.5 * rate, 0.5 * rate)
            };
            rate = positive_update(rate, delta)?;
        }
        Ok(rate)
    }

    /// Maximise `L_N` on a fixed sample set by Newton from `rate0`, falling
    /// back to a bracketing grid search when Newton stalls.
    fn maximise(&self, rate0: f64, samples: &[CompletedStats]) -> Result<f64> {
        let mut rate = rate0;
        let mut newton_ok = false;
        for _ in 0..100 {
            let (score, fisher) = self.score_and_fisher(rate, rate0, samples)?;
            if fisher <= 0.0 || !score.is_finite() {
                break;
            }
            let delta = score / fisher;
            let Ok(next) = positive_update(rate, delta) else {
                break;
            };
            rate = next;
            if delta.abs() < 1e-10 * rate.max(1.0) {
                newton_ok = true;
                break;
            }
        }
        if newton_ok {
            return Ok(rate);
        }
        // bracketing fallback on a λ grid around the reference
        let grid: Vec<f64> = (0..=400)
            .map(|i| rate0 * (0.5 + 1.5 * i as f64 / 400.0))
            .collect();
        let mut best = (f64::NEG_INFINITY, rate0);
        for &g in &grid {
            let v = self.log_likelihood_ratio(g, rate0, samples)?;
            if v > best.0 {
                best = (v, g);
            }
        }
        Ok(self.golden_refine(best.1, rate0 * 3.75e-3, rate0, samples)?)
    }

    fn golden_refine(
        &self,
        centre: f64,
        half_width: f64,
        rate0: f64,
        samples: &[CompletedStats],
    ) -> Result<f64> {
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut lo = (centre - half_width).max(1e-12);
        let mut hi = centre + half_width;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = self.log_likelihood_ratio(x1, rate0, samples)?;
        let mut f2 = self.log_likelihood_ratio(x2, rate0, samples)?;
        for _ in 0..200 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.log_likelihood_ratio(x2, rate0, samples)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.log_likelihood_ratio(x1, rate0, samples)?;
            }
            if hi - lo < 1e-10 * centre.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Full fit: Newton reference search, a final conditional sample under
    /// the reference, maximisation of `L_N`, and the sampled surface.
    pub fn fit(&self, start: f64, newton_steps: u32, chain: &ChainConfig) -> Result<McmlResult> {
        let lambda0 = self.newton_reference(start, newton_steps, chain)?;
        let final_chain = chain.with_seed(child_seed(chain.seed, u64::from(newton_steps)));
        let samples = self.conditional_stats(lambda0, &final_chain)?;
        let mut lambda_hat = self.maximise(lambda0, &samples)?;
        let mut best = self.log_likelihood_ratio(lambda_hat, lambda0, &samples)?;

        let mut curve: Vec<(f64, f64)> = Vec::with_capacity(102);
        for i in 0..=100 {
            let lam = lambda0 * (0.80 + 0.45 * i as f64 / 100.0);
            curve.push((lam, self.log_likelihood_ratio(lam, lambda0, &samples)?));
        }
        // the returned maximiser must dominate every evaluated point
        if let Some(&(grid_best, v)) = curve
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite surface"))
        {
            if v > best {
                lambda_hat =
                    self.golden_refine(grid_best, lambda0 * 0.01, lambda0, &samples)?;
                best = self.log_likelihood_ratio(lambda_hat, lambda0, &samples)?;
                if v > best {
                    lambda_hat = grid_best;
                    best = v;
                }
            }
        }
        curve.push((lambda_hat, best));
        curve.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite rates"));

        let (_, fisher) = self.score_and_fisher(lambda_hat, lambda0, &samples)?;
        Ok(McmlResult {
            lambda_hat,
            mc_inverse_fisher: 1.0 / fisher,
            lambda0,
            n_samples: chain.n_samples,
            llr_curve: curve,
        })
    }
}

fn positive_update(rate: f64, delta: f64) -> Result<f64> {
    let mut step = delta;
    for _ in 0..30 {
        let next = rate + step;
        if next > 0.0 && next.is_finite() {
            return Ok(next);
        }
        step *= 0.5;
    }
    Err(Error::NewtonDiverged { halvings: 30 })
}
