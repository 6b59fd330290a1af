//! Birth-and-death jump process driven by a locally bounded birth rate.
//!
//! A piecewise-constant function `g` dominates the conditional intensity on
//! the partition of the gap induced by the current points. The total birth
//! bound is `G = Σ (cell length)·g_i`, the death rate is the point count `n`,
//! sojourns are exponential with rate `G + n`, and proposed births are
//! thinned with probability `λ(u)/g_i`, which makes the effective birth rate
//! density equal the target intensity. A rejected birth still consumes its
//! sojourn (self-loop of the jump chain). A detected domination failure
//! aborts the run: a violated bound invalidates the stationary law.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::OrderedConfig;
use crate::error::{Error, Result};
use crate::samplers::GapTarget;

/// Relative slack before a bound breach is treated as a violation; tight
/// bounds are attained exactly (midpoint of a flanked cell), so strict
/// comparison would trip on rounding.
const BOUND_SLACK: f64 = 1e-9;

/// One cell of the gap partition with its dominating value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCell {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// Piecewise-constant dominating function on the partition induced by the
/// current gap points.
pub trait LocalBound {
    fn cells(&self, gap: &OrderedConfig) -> Vec<BoundCell>;

    /// State-independent cap `B ≥ g` (stability constant).
    fn global_cap(&self) -> f64;
}

impl<B: LocalBound + ?Sized> LocalBound for &B {
    fn cells(&self, gap: &OrderedConfig) -> Vec<BoundCell> {
        (**self).cells(gap)
    }

    fn global_cap(&self) -> f64 {
        (**self).global_cap()
    }
}

/// Constant dominating level on every cell; valid whenever the target
/// intensity never exceeds `level` (e.g. pairwise interaction with γ ≤ 1).
#[derive(Debug, Clone, Copy)]
pub struct UniformBound {
    t1: f64,
    t2: f64,
    level: f64,
}

impl UniformBound {
    pub fn new(window: &crate::config::BrokenWindow, level: f64) -> Result<Self> {
        if !(level.is_finite() && level > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bound level must be > 0, got {level}"
            )));
        }
        Ok(Self {
            t1: window.t1(),
            t2: window.t2(),
            level,
        })
    }
}

impl LocalBound for UniformBound {
    fn cells(&self, gap: &OrderedConfig) -> Vec<BoundCell> {
        let mut cells = Vec::with_capacity(gap.len() + 1);
        let mut lo = self.t1;
        for &t in gap.times() {
            cells.push(BoundCell {
                lo,
                hi: t,
                value: self.level,
            });
            lo = t;
        }
        cells.push(BoundCell {
            lo,
            hi: self.t2,
            value: self.level,
        });
        cells
    }

    fn global_cap(&self) -> f64 {
        self.level
    }
}

/// Continuous-time run protocol: burn-in time, then states recorded at
/// regular time points (time-weighted sampling of the jump process).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdConfig {
    pub burn_time: f64,
    pub sample_interval: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl BdConfig {
    pub fn new(burn_time: f64, sample_interval: f64, n_samples: u64, seed: u64) -> Result<Self> {
        if !(burn_time >= 0.0 && sample_interval > 0.0) || n_samples == 0 {
            return Err(Error::InvalidParameter(
                "need burn_time >= 0, sample_interval > 0, n_samples > 0".into(),
            ));
        }
        Ok(Self {
            burn_time,
            sample_interval,
            n_samples,
            seed,
        })
    }
}

/// One jump of the process. Returns the next state and the exponential
/// sojourn spent in the *current* state before the jump; a thinned birth
/// returns the unchanged state (self-loop).
pub fn bd_step<T: GapTarget, B: LocalBound, R: Rng + ?Sized>(
    target: &T,
    bound: &B,
    gap: &OrderedConfig,
    rng: &mut R,
) -> Result<(OrderedConfig, f64)> {
    let cells = bound.cells(gap);
    let birth_bound: f64 = cells.iter().map(|c| (c.hi - c.lo) * c.value).sum();
    let death_rate = gap.len() as f64;
    let total_rate = birth_bound + death_rate;
    if !(total_rate.is_finite() && total_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degenerate jump rate {total_rate}"
        )));
    }
    let sojourn = -rng.random::<f64>().ln() / total_rate;

    if rng.random::<f64>() < birth_bound / total_rate {
        // birth: pick a cell proportionally to (length · g), then thin
        let mut pick = rng.random::<f64>() * birth_bound;
        let mut chosen = cells[cells.len() - 1];
        for c in &cells {
            let w = (c.hi - c.lo) * c.value;
            if pick < w {
                chosen = *c;
                break;
            }
            pick -= w;
        }
        let u = chosen.lo + (chosen.hi - chosen.lo) * rng.random::<f64>();
        let Ok(position) = gap.insertion_index(u) else {
            return Ok((gap.clone(), sojourn));
        };
        let intensity = target.intensity(gap, u);
        if intensity > chosen.value * (1.0 + BOUND_SLACK) {
            return Err(Error::BoundViolation {
                at: u,
                intensity,
                bound: chosen.value,
            });
        }
        if rng.random::<f64>() < intensity / chosen.value {
            let mut next = gap.clone();
            next.insert_in_place(position, u);
            Ok((next, sojourn))
        } else {
            Ok((gap.clone(), sojourn))
        }
    } else {
        let index = rng.random_range(0..gap.len());
        Ok((gap.remove(index), sojourn))
    }
}

/// Evolve the jump process from the empty gap and record the state occupying
/// each time `burn_time + k·sample_interval`, `k = 1..=n_samples`.
pub fn run_bd<T: GapTarget, B: LocalBound>(
    target: &T,
    bound: &B,
    config: &BdConfig,
) -> Result<Vec<OrderedConfig>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = OrderedConfig::empty();
    let mut clock = 0.0;
    let mut samples = Vec::with_capacity(config.n_samples as usize);
    let mut next_sample = config.burn_time + config.sample_interval;
    while samples.len() < config.n_samples as usize {
        let (next, sojourn) = bd_step(target, bound, &state, &mut rng)?;
        let leave_at = clock + sojourn;
        while next_sample <= leave_at && samples.len() < config.n_samples as usize {
            samples.push(state.clone());
            next_sample += config.sample_interval;
        }
        state = next;
        clock = leave_at;
    }
    Ok(samples)
}
