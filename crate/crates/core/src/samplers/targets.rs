//! Gap targets for the concrete models.

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::markov::PairwiseModel;
use crate::model::SequentialDensity;
use crate::renewal::ErlangModel;
use crate::samplers::GapTarget;

/// Hidden-gap distribution of an Erlang renewal process given the observed
/// boundary configurations. Only `max(left)` and `min(right)` matter
/// (nearest-neighbour structure).
#[derive(Debug, Clone)]
pub struct RenewalGapTarget {
    model: ErlangModel,
    window: BrokenWindow,
    anchor: f64,
    successor: Option<f64>,
}

impl RenewalGapTarget {
    pub fn new(
        model: ErlangModel,
        window: BrokenWindow,
        left: &OrderedConfig,
        right: &OrderedConfig,
    ) -> Result<Self> {
        if (model.horizon() - window.t_end()).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "window t_end must equal the model horizon".into(),
            ));
        }
        if left.last().is_some_and(|t| t > window.t1()) {
            return Err(Error::InvalidData(
                "left configuration extends past t1".into(),
            ));
        }
        if right.first().is_some_and(|t| t < window.t2()) {
            return Err(Error::InvalidData(
                "right configuration starts before t2".into(),
            ));
        }
        Ok(Self {
            model,
            window,
            anchor: left.last().unwrap_or(0.0),
            successor: right.first(),
        })
    }

    pub fn model(&self) -> &ErlangModel {
        &self.model
    }

    fn log_intensity(&self, gap: &OrderedConfig, t: f64) -> f64 {
        let k = gap
            .insertion_index(t)
            .expect("sampler proposals never duplicate existing points");
        let prev = if k == 0 { self.anchor } else { gap.times()[k - 1] };
        let next = gap.times().get(k).copied().or(self.successor);
        self.model.log_flanked_intensity(prev, next, t)
    }
}

impl GapTarget for RenewalGapTarget {
    fn window(&self) -> &BrokenWindow {
        &self.window
    }

    fn intensity(&self, gap: &OrderedConfig, t: f64) -> f64 {
        self.log_intensity(gap, t).exp()
    }

    fn intensity_bound(&self) -> f64 {
        crate::samplers::erlang_bound::global_cap(&self.model)
    }
}

/// Hidden-gap distribution of the pairwise-interaction model. The boundary
/// enters only through points within range of the gap.
#[derive(Debug, Clone)]
pub struct PairwiseGapTarget {
    model: PairwiseModel,
    window: BrokenWindow,
    near_left: Vec<f64>,
    near_right: Vec<f64>,
}

impl PairwiseGapTarget {
    pub fn new(
        model: PairwiseModel,
        window: BrokenWindow,
        left: &OrderedConfig,
        right: &OrderedConfig,
    ) -> Result<Self> {
        if (model.horizon() - window.t_end()).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "window t_end must equal the model horizon".into(),
            ));
        }
        let near_left = left
            .times()
            .iter()
            .copied()
            .filter(|&x| x >= window.t1() - model.range())
            .collect();
        let near_right = right
            .times()
            .iter()
            .copied()
            .filter(|&x| x <= window.t2() + model.range())
            .collect();
        Ok(Self {
            model,
            window,
            near_left,
            near_right,
        })
    }

    pub fn model(&self) -> &PairwiseModel {
        &self.model
    }
}

impl GapTarget for PairwiseGapTarget {
    fn window(&self) -> &BrokenWindow {
        &self.window
    }

    fn intensity(&self, gap: &OrderedConfig, t: f64) -> f64 {
        let range = self.model.range();
        let close = self
            .near_left
            .iter()
            .filter(|&&x| t - x <= range)
            .count()
            + self
                .near_right
                .iter()
                .filter(|&&x| x - t <= range)
                .count()
            + gap
                .times()
                .iter()
                .filter(|&&x| (t - x).abs() <= range)
                .count();
        if close == 0 {
            self.model.activity()
        } else {
            self.model.activity() * self.model.interaction().powi(close as i32)
        }
    }

    fn intensity_bound(&self) -> f64 {
        // pair factors never exceed one
        self.model.activity()
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
    fn renewal_target_matches_conditional_papangelou() {
        let model = ErlangModel::new(2.0, 2, 4.0).unwrap();
        let window = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        let left = cfg(&[0.3, 0.9]);
        let right = cfg(&[3.1, 3.8]);
        let target = RenewalGapTarget::new(model, window, &left, &right).unwrap();
        let gap = cfg(&[1.5, 2.4]);
        for t in [1.2, 2.0, 2.8] {
            let direct = model
                .conditional_papangelou(&window, &left, &right, &gap, t)
                .unwrap();
            assert_relative_eq!(target.intensity(&gap, t), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn renewal_target_validates_data() {
        let model = ErlangModel::new(2.0, 2, 4.0).unwrap();
        let window = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        assert!(RenewalGapTarget::new(model, window, &cfg(&[1.5]), &cfg(&[])).is_err());
        assert!(RenewalGapTarget::new(model, window, &cfg(&[]), &cfg(&[2.5])).is_err());
    }

    #[test]
    fn pairwise_target_matches_full_papangelou() {
        let model = PairwiseModel::new(2.0, 0.5, 0.5, 4.0).unwrap();
        let window = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        let left = cfg(&[0.2, 0.8]);
        let right = cfg(&[3.2, 3.9]);
        let target = PairwiseGapTarget::new(model, window, &left, &right).unwrap();
        let gap = cfg(&[1.4, 2.2]);
        for t in [1.1, 1.9, 2.6] {
            let full = OrderedConfig::concat(&[&left, &gap, &right]).unwrap();
            let direct = model.papangelou(&full, t).unwrap();
            assert_relative_eq!(target.intensity(&gap, t), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn pairwise_bound_dominates() {
        let model = PairwiseModel::new(2.0, 0.5, 0.5, 4.0).unwrap();
        let window = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        let target =
            PairwiseGapTarget::new(model, window, &cfg(&[0.9]), &cfg(&[3.1])).unwrap();
        let gap = cfg(&[1.8]);
        for i in 0..100 {
            let t = 1.0 + 2.0 * (i as f64 + 0.5) / 100.0;
            assert!(target.intensity(&gap, t) <= target.intensity_bound() + 1e-12);
        }
    }
}
