//! Point configurations and the broken observation window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, finite sequence of event times. May be empty.
///
/// The carrier interval is stated by whichever operation consumes the
/// configuration; the type itself guarantees ordering and finiteness only.
/// Tied times are rejected rather than perturbed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderedConfig {
    times: Vec<f64>,
}

impl OrderedConfig {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        for &t in &times {
            if !t.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite time {t}")));
            }
        }
        for w in times.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidConfig(format!(
                    "times not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { times })
    }

    pub fn empty() -> Self {
        Self { times: Vec::new() }
    }

    /// Wrap times already known to be strictly increasing.
    pub(crate) fn from_sorted(times: Vec<f64>) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self { times }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn first(&self) -> Option<f64> {
        self.times.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.times.last().copied()
    }

    /// Chronological position `t` would take (0-based); error on a tie.
    pub fn insertion_index(&self, t: f64) -> Result<usize> {
        match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).expect("finite times"))
        {
            Ok(_) => Err(Error::DuplicatePoint(t)),
            Err(idx) => Ok(idx),
        }
    }

    /// New configuration with `t` inserted at its chronological position;
    /// also returns that position (0-based).
    pub fn insert(&self, t: f64) -> Result<(Self, usize)> {
        if !t.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite time {t}")));
        }
        let idx = self.insertion_index(t)?;
        let mut times = self.times.clone();
        times.insert(idx, t);
        Ok((Self { times }, idx))
    }

    /// New configuration with the point at `index` removed.
    pub fn remove(&self, index: usize) -> Self {
        let mut times = self.times.clone();
        times.remove(index);
        Self { times }
    }

    pub(crate) fn insert_in_place(&mut self, index: usize, t: f64) {
        self.times.insert(index, t);
    }

    /// Mutable access for callers that keep the ordering invariant themselves.
    pub(crate) fn times_mut(&mut self) -> &mut Vec<f64> {
        &mut self.times
    }

    pub(crate) fn remove_in_place(&mut self, index: usize) -> f64 {
        self.times.remove(index)
    }

    /// Concatenation of several configurations, validated as one sequence.
    pub fn concat(parts: &[&OrderedConfig]) -> Result<Self> {
        let mut times = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        for part in parts {
            times.extend_from_slice(part.times());
        }
        Self::new(times)
    }
}

/// Observation window `[0, t1] ∪ [t2, t_end]` with hidden gap `(t1, t2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrokenWindow {
    t1: f64,
    t2: f64,
    t_end: f64,
}

impl BrokenWindow {
    pub fn new(t1: f64, t2: f64, t_end: f64) -> Result<Self> {
        if !(t1.is_finite() && t2.is_finite() && t_end.is_finite())
            || !(0.0 < t1 && t1 < t2 && t2 < t_end)
        {
            return Err(Error::InvalidWindow { t1, t2, t_end });
        }
        Ok(Self { t1, t2, t_end })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Length of the hidden gap `(t1, t2)`.
    pub fn gap_len(&self) -> f64 {
        self.t2 - self.t1
    }

    /// Total length of the observed region `[0, t1] ∪ [t2, t_end]`.
    pub fn observed_len(&self) -> f64 {
        self.t1 + self.t_end - self.t2
    }

    /// True iff `t` falls in the open hidden gap.
    pub fn in_gap(&self, t: f64) -> bool {
        self.t1 < t && t < self.t2
    }
}

/// A configuration partitioned by a broken window: points in `[0, t1]`,
/// `(t1, t2)` and `[t2, t_end]` respectively. Boundary points belong to the
/// closed observed parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub left: OrderedConfig,
    pub gap: OrderedConfig,
    pub right: OrderedConfig,
}

impl SplitConfig {
    /// Reassemble the full configuration.
    pub fn concat(&self) -> OrderedConfig {
        let mut times =
            Vec::with_capacity(self.left.len() + self.gap.len() + self.right.len());
        times.extend_from_slice(self.left.times());
        times.extend_from_slice(self.gap.times());
        times.extend_from_slice(self.right.times());
        OrderedConfig::from_sorted(times)
    }
}

/// Partition `config` by the window. Points exactly at `t1` or `t2` are
/// assigned to the closed observed parts.
pub fn split(config: &OrderedConfig, window: &BrokenWindow) -> SplitConfig {
    let mut left = Vec::new();
    let mut gap = Vec::new();
    let mut right = Vec::new();
    for &t in config.times() {
        if t <= window.t1() {
            left.push(t);
        } else if t < window.t2() {
            gap.push(t);
        } else {
            right.push(t);
        }
    }
    SplitConfig {
        left: OrderedConfig::from_sorted(left),
        gap: OrderedConfig::from_sorted(gap),
        right: OrderedConfig::from_sorted(right),
    }
}
