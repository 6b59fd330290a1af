//! Naive rate estimation from fully observed inter-arrival intervals.
//!
//! Treats the observable interval lengths as an i.i.d. Erlang sample. For
//! fixed shape the rate MLE is `λ̂ = α n / Σ l_i`; the shape can be profiled
//! over an integer grid. Only intervals observed in full count: the
//! origin-anchored interval `[0, r₁]` (the process renews at zero) and
//! consecutive gaps within each observed segment. The interval straddling
//! the hidden gap and the censored interval after the last point are
//! excluded — which is exactly why this estimator is length-biased.

use crate::config::OrderedConfig;
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;

/// Largest shape tried by the profile-likelihood grid.
pub const PROFILE_SHAPE_MAX: u32 = 10;

/// Lengths of the fully observed inter-arrival intervals.
pub fn observable_intervals(left: &OrderedConfig, right: &OrderedConfig) -> Vec<f64> {
    let mut intervals = Vec::new();
    if let Some(first) = left.first() {
        intervals.push(first);
    }
    intervals.extend(left.times().windows(2).map(|w| w[1] - w[0]));
    intervals.extend(right.times().windows(2).map(|w| w[1] - w[0]));
    intervals
}

/// Rate (and shape) estimate from the observable intervals. With `shape`
/// given, `λ̂ = α n / Σ l_i`; otherwise the shape maximises the Erlang
/// profile likelihood over `1..=PROFILE_SHAPE_MAX`.
pub fn naive_estimate(
    left: &OrderedConfig,
    right: &OrderedConfig,
    shape: Option<u32>,
) -> Result<(f64, u32)> {
    let intervals = observable_intervals(left, right);
    if intervals.is_empty() {
        return Err(Error::NoObservableIntervals);
    }
    let n = intervals.len() as f64;
    let total: f64 = intervals.iter().sum();
    match shape {
        Some(a) => {
            if a < 1 {
                return Err(Error::InvalidParameter("shape must be >= 1".into()));
            }
            Ok((f64::from(a) * n / total, a))
        }
        None => {
            let log_sum: f64 = intervals.iter().map(|l| l.ln()).sum();
            let mut best = (f64::NEG_INFINITY, 1_u32);
            for a in 1..=PROFILE_SHAPE_MAX {
                let af = f64::from(a);
                let rate = af * n / total;
                // Erlang log likelihood with λ profiled out at λ̂(α)
                let ll = n * af * rate.ln() + (af - 1.0) * log_sum
                    - rate * total
                    - n * ln_factorial(u64::from(a) - 1);
                if ll > best.0 {
                    best = (ll, a);
                }
            }
            let a = best.1;
            Ok((f64::from(a) * n / total, a))
        }
    }
}
