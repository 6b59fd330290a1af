//! Fixed-range pairwise-interaction process (Strauss form) on `[0, T]`.
//!
//! Unnormalised density `β₁^n γ^{s_R}` where `s_R` counts pairs within range
//! `R`; the empty-configuration value is taken as 1, so all downstream uses
//! (Papangelou ratios, MCMC) are free of the normalising constant. With
//! `γ ∈ [0, 1]` the density is integrable and, for `γ > 0`, hereditary;
//! `γ = 0` is the hard-core case.

use serde::{Deserialize, Serialize};

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::model::SequentialDensity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseModel {
    activity: f64,
    interaction: f64,
    range: f64,
    horizon: f64,
}

impl PairwiseModel {
    pub fn new(activity: f64, interaction: f64, range: f64, horizon: f64) -> Result<Self> {
        if !(activity.is_finite() && activity > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "activity must be > 0, got {activity}"
            )));
        }
        if !(0.0..=1.0).contains(&interaction) {
            return Err(Error::InvalidParameter(format!(
                "interaction must lie in [0, 1], got {interaction}"
            )));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::InvalidParameter(format!("range must be > 0, got {range}")));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {horizon}"
            )));
        }
        Ok(Self {
            activity,
            interaction,
            range,
            horizon,
        })
    }

    pub fn activity(&self) -> f64 {
        self.activity
    }

    pub fn interaction(&self) -> f64 {
        self.interaction
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Number of pairs at distance `≤ R` (closed comparison).
    pub fn close_pairs(&self, config: &OrderedConfig) -> usize {
        let ts = config.times();
        let mut count = 0;
        let mut lo = 0;
        for (j, &tj) in ts.iter().enumerate() {
            // same subtraction as the pair test, so rounding agrees
            while tj - ts[lo] > self.range {
                lo += 1;
            }
            count += j - lo;
        }
        count
    }

    fn log_pair_factor(&self, pairs: usize) -> f64 {
        if pairs == 0 {
            0.0
        } else if self.interaction == 0.0 {
            f64::NEG_INFINITY
        } else {
            pairs as f64 * self.interaction.ln()
        }
    }

    /// Papangelou conditional intensity `β₁ γ^{#neighbours within R}` for
    /// inserting `t`.
    pub fn papangelou(&self, config: &OrderedConfig, t: f64) -> Result<f64> {
        Ok(self.log_papangelou(config, t)?.exp())
    }

    pub fn log_papangelou(&self, config: &OrderedConfig, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(Error::OutOfRange {
                what: "insertion time",
                value: t,
                lo: 0.0,
                hi: self.horizon,
            });
        }
        config.insertion_index(t)?;
        let neighbours = self.neighbours_within_range(config.times(), t);
        Ok(self.activity.ln() + self.log_pair_factor(neighbours))
    }

    fn neighbours_within_range(&self, times: &[f64], t: f64) -> usize {
        times
            .iter()
            .filter(|&&x| (t - x).abs() <= self.range)
            .count()
    }

    /// First-order interaction of the hidden-gap law:
    /// `β₁ γ^{#boundary points within R of t}`. Only boundary points in
    /// `[T1 - R, T1] ∪ [T2, T2 + R]` can contribute.
    pub fn conditional_first_order(
        &self,
        window: &BrokenWindow,
        left: &OrderedConfig,
        right: &OrderedConfig,
        t: f64,
    ) -> Result<f64> {
        if !window.in_gap(t) {
            return Err(Error::OutOfRange {
                what: "gap insertion time",
                value: t,
                lo: window.t1(),
                hi: window.t2(),
            });
        }
        let close = left
            .times()
            .iter()
            .filter(|&&x| t - x <= self.range)
            .count()
            + right
                .times()
                .iter()
                .filter(|&&x| x - t <= self.range)
                .count();
        Ok((self.activity.ln() + self.log_pair_factor(close)).exp())
    }
}

impl SequentialDensity for PairwiseModel {
    fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `n ln β₁ + s_R ln γ`; `-∞` iff `γ = 0` and a close pair exists.
    fn log_density(&self, config: &OrderedConfig) -> f64 {
        let times = config.times();
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if first < 0.0 || last > self.horizon {
                return f64::NEG_INFINITY;
            }
        }
        config.len() as f64 * self.activity.ln() + self.log_pair_factor(self.close_pairs(config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(ts: &[f64]) -> OrderedConfig {
        OrderedConfig::new(ts.to_vec()).unwrap()
    }

    #[test]
    fn density_poisson_degeneracy() {
        let m = PairwiseModel::new(2.0, 1.0, 0.3, 4.0).unwrap();
        let c = cfg(&[0.1, 0.2, 1.0]);
        assert_relative_eq!(m.log_density(&c), 3.0 * 2.0_f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn density_hard_core() {
        let m = PairwiseModel::new(2.0, 0.0, 0.3, 4.0).unwrap();
        assert_eq!(m.log_density(&cfg(&[1.0, 1.2])), f64::NEG_INFINITY);
        assert_relative_eq!(
            m.log_density(&cfg(&[1.0, 2.0])),
            2.0 * 2.0_f64.ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn density_counts_pairs_brute_force() {
        let m = PairwiseModel::new(2.0, 0.5, 0.3, 4.0).unwrap();
        // pairs within 0.3 of (0.1, 0.3, 1.0): only (0.1, 0.3)
        let c = cfg(&[0.1, 0.3, 1.0]);
        assert_eq!(m.close_pairs(&c), 1);
        assert_relative_eq!(
            m.log_density(&c),
            3.0 * 2.0_f64.ln() + 0.5_f64.ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn close_pairs_matches_quadratic_count() {
        let m = PairwiseModel::new(1.0, 0.5, 0.37, 10.0).unwrap();
        let c = cfg(&[0.0, 0.2, 0.5, 0.56, 0.95, 2.0, 2.36, 2.37, 9.9]);
        let ts = c.times();
        let mut brute = 0;
        for i in 0..ts.len() {
            for j in (i + 1)..ts.len() {
                if ts[j] - ts[i] <= 0.37 {
                    brute += 1;
                }
            }
        }
        assert_eq!(m.close_pairs(&c), brute);
    }

    #[test]
    fn papangelou_examples() {
        let m = PairwiseModel::new(2.0, 0.5, 0.3, 4.0).unwrap();
        // two neighbours within 0.3
        let v = m.papangelou(&cfg(&[1.0, 1.2]), 1.1).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-14);
        // isolated point
        let v = m.papangelou(&cfg(&[1.0, 1.2]), 3.0).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
        // γ = 1 is constant activity
        let p = PairwiseModel::new(2.0, 1.0, 0.3, 4.0).unwrap();
        let v = p.papangelou(&cfg(&[1.0, 1.2]), 1.1).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn papangelou_equals_density_ratio() {
        let m = PairwiseModel::new(2.0, 0.5, 0.3, 4.0).unwrap();
        let c = cfg(&[0.2, 0.5, 1.9, 2.05, 3.5]);
        for t in [0.1, 0.45, 1.95, 2.5, 3.9] {
            let (with_t, _) = c.insert(t).unwrap();
            let ratio = m.log_density(&with_t) - m.log_density(&c);
            let lam = m.log_papangelou(&c, t).unwrap();
            assert!(crate::numeric::rel_diff(lam, ratio) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn papangelou_range_locality() {
        let m = PairwiseModel::new(2.0, 0.5, 0.3, 4.0).unwrap();
        let t = 2.0;
        let near = cfg(&[1.8, 2.1]);
        let with_far = cfg(&[0.2, 1.8, 2.1, 3.9]);
        assert_relative_eq!(
            m.papangelou(&near, t).unwrap(),
            m.papangelou(&with_far, t).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn conditional_first_order_examples() {
        let w = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        let m = PairwiseModel::new(2.0, 0.5, 0.5, 4.0).unwrap();
        // one close boundary neighbour at 0.8
        let v = m
            .conditional_first_order(&w, &cfg(&[0.8]), &OrderedConfig::empty(), 1.2)
            .unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
        // no boundary point within range
        let v = m
            .conditional_first_order(&w, &cfg(&[0.2]), &cfg(&[3.9]), 2.0)
            .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
        // γ = 1 ignores the boundary
        let p = PairwiseModel::new(2.0, 1.0, 0.5, 4.0).unwrap();
        let v = p
            .conditional_first_order(&w, &cfg(&[0.8]), &cfg(&[3.1]), 2.9)
            .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
        assert!(m
            .conditional_first_order(&w, &cfg(&[0.8]), &OrderedConfig::empty(), 0.5)
            .is_err());
    }

    #[test]
    fn conditional_intensity_factorises_through_first_order() {
        // papangelou on the concatenation = conditional_first_order · γ^{gap neighbours}
        let w = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        let m = PairwiseModel::new(2.0, 0.5, 0.5, 4.0).unwrap();
        let left = cfg(&[0.2, 0.8]);
        let right = cfg(&[3.2, 3.4]);
        let gap = cfg(&[1.3, 2.2, 2.6]);
        for t in [1.1, 1.75, 2.4, 2.9] {
            let full = OrderedConfig::concat(&[&left, &gap, &right]).unwrap();
            let direct = m.papangelou(&full, t).unwrap();
            let gap_neighbours = gap
                .times()
                .iter()
                .filter(|&&x| (t - x).abs() <= 0.5)
                .count();
            let factored = m.conditional_first_order(&w, &left, &right, t).unwrap()
                * 0.5_f64.powi(gap_neighbours as i32);
            assert_relative_eq!(direct, factored, max_relative = 1e-12);
        }
    }
}
