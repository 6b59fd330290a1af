//! Density abstraction shared by the concrete models and the oracles.

use crate::config::OrderedConfig;

/// Unnormalised density of a sequential point process with respect to the
/// unit-rate Poisson reference measure on `[0, horizon]`.
///
/// The convention throughout is `density = e^{|carrier|} · Janossy`; a value
/// of `f64::NEG_INFINITY` from [`log_density`](Self::log_density) encodes a
/// configuration of zero density. Configurations with points outside the
/// carrier have zero density.
pub trait SequentialDensity {
    fn horizon(&self) -> f64;

    /// Natural logarithm of the density of the ordered configuration.
    fn log_density(&self, config: &OrderedConfig) -> f64;
}
