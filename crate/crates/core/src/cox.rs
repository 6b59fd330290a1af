//! Two-level compound Poisson process: the closed-form Cox conditional
//! structure used as a test harness for latent-intensity models.
//!
//! The driving intensity is constant over `[0, T]`, equal to `λ₁` or `λ₂`
//! with prior probability one half each. Conditioning on the observed count
//! reweights the level distribution; the hidden gap is then a mixture of
//! Poisson laws under the reweighted levels.

use serde::{Deserialize, Serialize};

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::model::SequentialDensity;
use crate::numeric::{ln_factorial, log_sum_exp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundPoissonModel {
    lambda1: f64,
    lambda2: f64,
    window: BrokenWindow,
}

impl CompoundPoissonModel {
    pub fn new(lambda1: f64, lambda2: f64, window: BrokenWindow) -> Result<Self> {
        if !(lambda1.is_finite() && lambda1 > 0.0 && lambda2.is_finite() && lambda2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "levels must be > 0, got {lambda1} and {lambda2}"
            )));
        }
        if lambda1 == lambda2 {
            return Err(Error::InvalidParameter(
                "the two intensity levels must differ".into(),
            ));
        }
        Ok(Self {
            lambda1,
            lambda2,
            window,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn window(&self) -> &BrokenWindow {
        &self.window
    }

    /// Posterior probability of each level given `n_observed` points in the
    /// observed region of total length `T̃`: `p_i ∝ λ_i^N e^{-λ_i T̃}`.
    pub fn posterior_level_prob(&self, n_observed: usize) -> (f64, f64) {
        let t_obs = self.window.observed_len();
        let n = n_observed as f64;
        let log_w1 = n * self.lambda1.ln() - self.lambda1 * t_obs;
        let log_w2 = n * self.lambda2.ln() - self.lambda2 * t_obs;
        let total = log_sum_exp(&[log_w1, log_w2]);
        ((log_w1 - total).exp(), (log_w2 - total).exp())
    }

    /// Conditional Janossy density of a gap configuration given the observed
    /// count: `Σ_i p_i λ_i^n e^{-λ_i (T2-T1)}`. Depends on the gap only
    /// through its cardinality; zero off the gap carrier.
    pub fn conditional_gap_janossy(&self, n_observed: usize, gap: &OrderedConfig) -> f64 {
        if !gap.times().iter().all(|&t| self.window.in_gap(t)) {
            return 0.0;
        }
        let (p1, p2) = self.posterior_level_prob(n_observed);
        let gap_len = self.window.gap_len();
        let n = gap.len() as i32;
        p1 * self.lambda1.powi(n) * (-self.lambda1 * gap_len).exp()
            + p2 * self.lambda2.powi(n) * (-self.lambda2 * gap_len).exp()
    }

    /// Posterior distribution of the hidden-point count over `0..=n_max`:
    /// entry `n` is `Σ_i p_i · Poisson(λ_i (T2-T1))` pmf at `n`. The entries
    /// sum to the mixture cdf at `n_max` (not renormalised).
    pub fn gap_count_posterior(&self, n_observed: usize, n_max: usize) -> Vec<f64> {
        let (p1, p2) = self.posterior_level_prob(n_observed);
        let gap_len = self.window.gap_len();
        (0..=n_max)
            .map(|n| {
                p1 * poisson_pmf(self.lambda1 * gap_len, n)
                    + p2 * poisson_pmf(self.lambda2 * gap_len, n)
            })
            .collect()
    }

    /// Unconditional sequential density of the model on `[0, t_end]`, for use
    /// with the quadrature oracles.
    pub fn density(&self) -> CompoundPoissonDensity {
        CompoundPoissonDensity { model: *self }
    }
}

fn poisson_pmf(mean: f64, n: usize) -> f64 {
    (n as f64 * mean.ln() - mean - ln_factorial(n as u64)).exp()
}

/// Density `f(t⃗) = e^T Σ_i ½ λ_i^n e^{-λ_i T}` of the two-level model with
/// respect to the unit-rate Poisson reference; location-free given `n`.
#[derive(Debug, Clone, Copy)]
pub struct CompoundPoissonDensity {
    model: CompoundPoissonModel,
}

impl SequentialDensity for CompoundPoissonDensity {
    fn horizon(&self) -> f64 {
        self.model.window.t_end()
    }

    fn log_density(&self, config: &OrderedConfig) -> f64 {
        let horizon = self.horizon();
        let times = config.times();
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if first <= 0.0 || last > horizon {
                return f64::NEG_INFINITY;
            }
        }
        let n = config.len() as f64;
        let half = 0.5_f64.ln();
        let l1 = half + n * self.model.lambda1.ln() - self.model.lambda1 * horizon;
        let l2 = half + n * self.model.lambda2.ln() - self.model.lambda2 * horizon;
        horizon + log_sum_exp(&[l1, l2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(l1: f64, l2: f64, w: (f64, f64, f64)) -> CompoundPoissonModel {
        CompoundPoissonModel::new(l1, l2, BrokenWindow::new(w.0, w.1, w.2).unwrap()).unwrap()
    }

    #[test]
    fn rejects_equal_levels() {
        let w = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        assert!(CompoundPoissonModel::new(2.0, 2.0, w).is_err());
    }

    #[test]
    fn posterior_closed_form() {
        // T̃ = 1, N = 0: p1 = e^{-1} / (e^{-1} + e^{-2})
        let m = model(1.0, 2.0, (0.5, 2.5, 3.0));
        assert_relative_eq!(m.window().observed_len(), 1.0);
        let (p1, p2) = m.posterior_level_prob(0);
        let expect = (-1.0_f64).exp() / ((-1.0_f64).exp() + (-2.0_f64).exp());
        assert_relative_eq!(p1, expect, max_relative = 1e-14);
        assert_relative_eq!(p1 + p2, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn posterior_monotone_in_count() {
        let m = model(1.0, 2.0, (0.5, 2.5, 3.0));
        let mut prev = 0.0;
        for n in 0..40 {
            let (_, p2) = m.posterior_level_prob(n);
            assert!(p2 >= prev);
            prev = p2;
        }
        // large counts favour the larger level
        assert!(prev > 0.99);
    }

    #[test]
    fn conditional_gap_janossy_empty_case() {
        let m = model(1.0, 2.0, (1.0, 2.0, 3.0));
        let (p1, p2) = m.posterior_level_prob(3);
        let expect = p1 * (-1.0_f64).exp() + p2 * (-2.0_f64).exp();
        assert_relative_eq!(
            m.conditional_gap_janossy(3, &OrderedConfig::empty()),
            expect,
            max_relative = 1e-14
        );
    }

    #[test]
    fn conditional_gap_janossy_near_degenerate_mixture() {
        let m = model(2.0, 2.0 + 1e-9, (1.0, 2.0, 3.0));
        let gap = OrderedConfig::new(vec![1.2, 1.5, 1.9]).unwrap();
        let poisson = 2.0_f64.powi(3) * (-2.0_f64).exp();
        assert_relative_eq!(
            m.conditional_gap_janossy(4, &gap),
            poisson,
            max_relative = 1e-6
        );
    }

    #[test]
    fn conditional_gap_janossy_vanishes_off_carrier() {
        let m = model(1.0, 2.0, (1.0, 2.0, 3.0));
        let gap = OrderedConfig::new(vec![0.5]).unwrap();
        assert_eq!(m.conditional_gap_janossy(2, &gap), 0.0);
    }

    #[test]
    fn gap_count_posterior_brute_force() {
        // independent Bayes enumeration over the two levels
        let m = model(1.0, 2.0, (1.0, 2.0, 3.0));
        let n_obs = 5;
        let pmf = m.gap_count_posterior(n_obs, 10);
        let t_obs = m.window().observed_len();
        let gap_len = m.window().gap_len();
        let w1 = 1.0_f64.powi(n_obs as i32) * (-1.0 * t_obs).exp();
        let w2 = 2.0_f64.powi(n_obs as i32) * (-2.0 * t_obs).exp();
        for (n, &p) in pmf.iter().enumerate() {
            let brute = (w1 * poisson_pmf(1.0 * gap_len, n) + w2 * poisson_pmf(2.0 * gap_len, n))
                / (w1 + w2);
            assert!((p - brute).abs() <= 1e-12 * brute.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn gap_count_posterior_degenerate_input() {
        let m = model(3.0, 3.0 + 1e-12, (1.0, 2.0, 3.0));
        let pmf = m.gap_count_posterior(0, 12);
        for (n, &p) in pmf.iter().enumerate() {
            assert_relative_eq!(p, poisson_pmf(3.0, n), max_relative = 1e-8);
        }
    }

    #[test]
    fn density_reduces_to_poisson_when_constant() {
        // Eq. 10 consistency: constant level gives λ^n e^{-λT} (up to e^T)
        let m = model(2.0, 2.0 + 1e-13, (1.0, 2.0, 3.0));
        let d = m.density();
        let c = OrderedConfig::new(vec![0.5, 1.5, 2.7]).unwrap();
        let expect = 3.0 + 3.0 * 2.0_f64.ln() - 2.0 * 3.0;
        assert_relative_eq!(d.log_density(&c), expect, max_relative = 1e-10);
    }
}
