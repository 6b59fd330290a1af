//! Markov chain Monte Carlo samplers for the conditional distribution of the
//! hidden points in the gap, generic over any model that exposes a
//! conditional Papangelou intensity.

mod bd;
mod erlang_bound;
mod mh;
mod targets;

pub use bd::{bd_step, run_bd, BdConfig, BoundCell, LocalBound, UniformBound};
pub use erlang_bound::{erlang_local_bound, ErlangLocalBound};
pub use mh::{mh_step, run_mh};
pub use targets::{PairwiseGapTarget, RenewalGapTarget};

use serde::{Deserialize, Serialize};

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};

/// Conditional Papangelou intensity of a hidden-gap distribution.
///
/// Implementations must be hereditary (the intensity stays positive along any
/// build-up of a positive-density gap configuration) and uniformly bounded by
/// [`intensity_bound`](Self::intensity_bound).
pub trait GapTarget {
    fn window(&self) -> &BrokenWindow;

    /// Intensity of a point at `t` given the gap configuration; callers
    /// guarantee `t` lies in the open gap and is not already present.
    fn intensity(&self, gap: &OrderedConfig, t: f64) -> f64;

    /// Uniform upper bound on the intensity over all states.
    fn intensity_bound(&self) -> f64;
}

impl<T: GapTarget + ?Sized> GapTarget for &T {
    fn window(&self) -> &BrokenWindow {
        (**self).window()
    }

    fn intensity(&self, gap: &OrderedConfig, t: f64) -> f64 {
        (**self).intensity(gap, t)
    }

    fn intensity_bound(&self) -> f64 {
        (**self).intensity_bound()
    }
}

/// Run protocol of a discrete-time chain: burn-in steps, thinning interval,
/// number of retained samples and the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: u64,
    pub thin: u64,
    pub n_samples: u64,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(burn_in: u64, thin: u64, n_samples: u64, seed: u64) -> Result<Self> {
        if thin == 0 || n_samples == 0 {
            return Err(Error::InvalidParameter(
                "thin and n_samples must be positive".into(),
            ));
        }
        Ok(Self {
            burn_in,
            thin,
            n_samples,
            seed,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_samples(mut self, n_samples: u64) -> Self {
        self.n_samples = n_samples;
        self
    }
}

impl Default for ChainConfig {
    /// Long-run protocol: a thousand steps burn-in, sub-sampled every
    /// thousand steps.
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thin: 1000,
            n_samples: 1000,
            seed: 0,
        }
    }
}
