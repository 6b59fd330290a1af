//! Simulation, likelihood-based and moment-based parameter estimation, and
//! Monte Carlo state estimation for temporal point processes observed in a
//! broken interval `[0, T1] ∪ [T2, T]`.
//!
//! The pieces fit together as follows. [`config`] holds ordered event
//! configurations and the broken window. [`renewal`], [`markov`] and [`cox`]
//! implement concrete models: their densities with respect to the unit-rate
//! Poisson reference, Papangelou conditional intensities, and the explicit
//! conditional (hidden-gap) intensities obtained when the window is broken.
//! [`oracle`] evaluates the marginal and conditional distributions of the
//! hidden points by brute-force quadrature on small instances, as ground
//! truth for everything else. [`samplers`] draws from the hidden-gap law by
//! birth/death Metropolis-Hastings or a locally bounded birth-and-death jump
//! process; [`inference`] builds naive and Monte Carlo maximum likelihood
//! rate estimators on top, together with the replicated bias study. [`lgcp`]
//! carries the discretised log-Gaussian Cox pipeline with an
//! Ornstein-Uhlenbeck latent field: baseline regression, minimum-contrast
//! field-parameter estimation, and Langevin state estimation of the field
//! over the gap.
//!
//! All types are immutable values, simulation and sampling take explicit
//! seeds, and replicated studies derive per-replicate streams with
//! [`seed::child_seed`], so every result is reproducible in isolation.

pub mod config;
pub mod cox;
pub mod error;
pub mod inference;
pub mod io;
pub mod lgcp;
pub mod markov;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod renewal;
pub mod samplers;
pub mod seed;

pub use config::{split, BrokenWindow, OrderedConfig, SplitConfig};
pub use error::{Error, Result};
pub use model::SequentialDensity;
