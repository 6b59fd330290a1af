//! Renewal process with Erlang inter-arrival times on `[0, T]`.
//!
//! The process starts at time zero; arrival times are partial sums of i.i.d.
//! Erlang(shape, rate) inter-arrival draws. The density with respect to the
//! unit-rate Poisson reference factorises over inter-arrival gaps with a
//! survival term for the censored interval after the last point, and the
//! Papangelou conditional intensity depends on a candidate point only through
//! its two flanking neighbours (nearest-neighbour Markov structure). That
//! locality is what makes the hidden-gap conditional intensity explicit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::model::SequentialDensity;
use crate::numeric::ln_factorial;

/// Erlang inter-arrival law: rate `λ > 0`, integer shape `α ≥ 1`, with the
/// process observed on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErlangModel {
    rate: f64,
    shape: u32,
    horizon: f64,
}

impl ErlangModel {
    pub fn new(rate: f64, shape: u32, horizon: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!("rate must be > 0, got {rate}")));
        }
        if shape < 1 {
            return Err(Error::InvalidParameter("shape must be >= 1".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {horizon}"
            )));
        }
        Ok(Self {
            rate,
            shape,
            horizon,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn shape(&self) -> u32 {
        self.shape
    }

    /// Same law with a different rate (shape and horizon kept).
    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        Self::new(rate, self.shape, self.horizon)
    }

    /// Inter-arrival density `π(x) = λ^α x^{α-1} e^{-λx} / (α-1)!`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_nonnegative(x)?;
        Ok(self.log_pdf(x).exp())
    }

    pub(crate) fn log_pdf(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if self.shape == 1 {
            return self.rate.ln() - self.rate * x;
        }
        if x == 0.0 {
            return f64::NEG_INFINITY;
        }
        let a = f64::from(self.shape);
        a * self.rate.ln() + (a - 1.0) * x.ln()
            - self.rate * x
            - ln_factorial(u64::from(self.shape) - 1)
    }

    /// `1 - F(x)` via the explicit Poisson partial sum
    /// `e^{-λx} Σ_{i<α} (λx)^i / i!` (no cancellation for large `λx`).
    pub fn survival(&self, x: f64) -> Result<f64> {
        self.check_nonnegative(x)?;
        Ok(self.log_survival(x).exp())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.survival(x)?)
    }

    pub(crate) fn log_survival(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        -self.rate * x + self.log_poisson_partial_sum(self.rate * x, self.shape)
    }

    /// `ln Σ_{i<terms} y^i / i!` by term recurrence.
    fn log_poisson_partial_sum(&self, y: f64, terms: u32) -> f64 {
        if terms == 1 {
            return 0.0;
        }
        let mut term = 1.0_f64;
        let mut sum = 1.0_f64;
        for i in 1..terms {
            term *= y / f64::from(i);
            sum += term;
        }
        if sum.is_finite() {
            sum.ln()
        } else {
            // extreme y·α; redo in log space
            let logs: Vec<f64> = (0..terms)
                .map(|i| f64::from(i) * y.ln() - ln_factorial(u64::from(i)))
                .collect();
            crate::numeric::log_sum_exp(&logs)
        }
    }

    fn check_nonnegative(&self, x: f64) -> Result<()> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::OutOfRange {
                what: "inter-arrival argument",
                value: x,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// All arrival times in `(0, horizon]`, from summed exponential draws.
    /// Deterministic given the seed.
    pub fn simulate(&self, seed: u64) -> OrderedConfig {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.simulate_with(&mut rng)
    }

    pub fn simulate_with<R: Rng + ?Sized>(&self, rng: &mut R) -> OrderedConfig {
        let exp = Exp::new(self.rate).expect("rate validated at construction");
        let mut times = Vec::new();
        let mut t = 0.0;
        loop {
            let mut gap = 0.0;
            for _ in 0..self.shape {
                gap += exp.sample(rng);
            }
            t += gap;
            if t > self.horizon {
                break;
            }
            times.push(t);
        }
        OrderedConfig::from_sorted(times)
    }

    /// Papangelou conditional intensity for inserting `t` at its
    /// chronological position: the density ratio with/without `t`.
    pub fn papangelou(&self, config: &OrderedConfig, t: f64) -> Result<f64> {
        Ok(self.log_papangelou(config, t)?.exp())
    }

    pub fn log_papangelou(&self, config: &OrderedConfig, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::OutOfRange {
                what: "insertion time",
                value: t,
                lo: 0.0,
                hi: self.horizon,
            });
        }
        let k = config.insertion_index(t)?;
        let prev = if k == 0 { 0.0 } else { config.times()[k - 1] };
        let next = config.times().get(k).copied();
        Ok(self.log_flanked_intensity(prev, next, t))
    }

    /// Intensity of a point at `t` flanked by `prev` and, when present,
    /// `next`; with no successor the censored survival ratio applies.
    pub(crate) fn log_flanked_intensity(&self, prev: f64, next: Option<f64>, t: f64) -> f64 {
        match next {
            Some(q) => self.log_pdf(t - prev) + self.log_pdf(q - t) - self.log_pdf(q - prev),
            None => {
                self.log_pdf(t - prev) + self.log_survival(self.horizon - t)
                    - self.log_survival(self.horizon - prev)
            }
        }
    }

    /// Conditional Papangelou intensity of the hidden-gap law at `t` given
    /// `gap` in `(T1, T2)` and the observed boundary configurations. The
    /// anchor before the gap is `max(left)` (or 0 when `left` is empty); the
    /// successor after it is `min(right)` when `right` is non-empty, else the
    /// survival form with the model horizon.
    pub fn conditional_papangelou(
        &self,
        window: &BrokenWindow,
        left: &OrderedConfig,
        right: &OrderedConfig,
        gap: &OrderedConfig,
        t: f64,
    ) -> Result<f64> {
        Ok(self
            .log_conditional_papangelou(window, left, right, gap, t)?
            .exp())
    }

    pub fn log_conditional_papangelou(
        &self,
        window: &BrokenWindow,
        left: &OrderedConfig,
        right: &OrderedConfig,
        gap: &OrderedConfig,
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
        let anchor = left.last().unwrap_or(0.0);
        let succ = right.first();
        let k = gap.insertion_index(t)?;
        let prev = if k == 0 { anchor } else { gap.times()[k - 1] };
        let next = gap.times().get(k).copied().or(succ);
        Ok(self.log_flanked_intensity(prev, next, t))
    }

    /// Log density ratio against `reference` (same shape and horizon),
    /// through the sufficient statistic `(n, horizon - t_n)`.
    pub fn log_likelihood_ratio(
        &self,
        reference: &ErlangModel,
        config: &OrderedConfig,
    ) -> Result<f64> {
        if self.shape != reference.shape || self.horizon != reference.horizon {
            return Err(Error::InvalidParameter(
                "likelihood ratio requires matching shape and horizon".into(),
            ));
        }
        let (n, backward) = sufficient_stats(config, self.horizon);
        Ok(self.log_likelihood_ratio_from_stats(reference, n, backward))
    }

    /// Same ratio straight from the sufficient statistic.
    pub fn log_likelihood_ratio_from_stats(
        &self,
        reference: &ErlangModel,
        n: usize,
        backward: f64,
    ) -> f64 {
        let t_last = self.horizon - backward;
        let a = f64::from(self.shape);
        n as f64 * a * (self.rate.ln() - reference.rate.ln())
            - (self.rate - reference.rate) * t_last
            + self.log_survival(backward)
            - reference.log_survival(backward)
    }

    /// First and second derivatives in the rate of the log density, as
    /// functions of the sufficient statistic. The reference term of a
    /// likelihood ratio is rate-free, so these are also the derivatives of
    /// any ratio anchored at a fixed reference.
    pub fn log_density_rate_derivs(&self, n: usize, backward: f64) -> (f64, f64) {
        let a = f64::from(self.shape);
        let y = self.rate * backward;
        let s0 = poisson_partial_sum(y, self.shape);
        let s1 = if self.shape >= 2 {
            poisson_partial_sum(y, self.shape - 1)
        } else {
            0.0
        };
        let s2 = if self.shape >= 3 {
            poisson_partial_sum(y, self.shape - 2)
        } else {
            0.0
        };
        let first = n as f64 * a / self.rate - self.horizon + backward * s1 / s0;
        let second = -(n as f64) * a / (self.rate * self.rate)
            + backward * backward * (s2 * s0 - s1 * s1) / (s0 * s0);
        (first, second)
    }
}

impl SequentialDensity for ErlangModel {
    fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Log of `e^T (1 - F(T - t_n)) Π π(t_i - t_{i-1})` with `t_0 = 0`;
    /// for the empty configuration, `T + ln(1 - F(T))`.
    fn log_density(&self, config: &OrderedConfig) -> f64 {
        let times = config.times();
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if first <= 0.0 || last > self.horizon {
                return f64::NEG_INFINITY;
            }
        }
        let mut acc = self.horizon;
        let mut prev = 0.0;
        for &t in times {
            acc += self.log_pdf(t - prev);
            prev = t;
        }
        acc + self.log_survival(self.horizon - prev)
    }
}

/// `Σ_{i<terms} y^i / i!` in linear space.
fn poisson_partial_sum(y: f64, terms: u32) -> f64 {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for i in 1..terms {
        term *= y / f64::from(i);
        sum += term;
    }
    sum
}

/// Sufficient statistic `(n, T - t_n)` of the Erlang rate family;
/// `(0, T)` for an empty configuration.
pub fn sufficient_stats(config: &OrderedConfig, horizon: f64) -> (usize, f64) {
    match config.last() {
        Some(last) => (config.len(), horizon - last),
        None => (0, horizon),
    }
}
