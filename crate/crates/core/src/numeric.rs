//! Log-space numeric helpers.
//!
//! Densities are represented and combined in log space throughout the crate;
//! `f64::NEG_INFINITY` encodes a vanishing density.

/// Stable log of a sum of exponentials over a slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator for sums too large to buffer.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

/// ln(n!) via the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

/// |a - b| / max(1, |a|, |b|).
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

/// Goodness-of-fit chi-square p-value of observed category counts against a
/// probability vector. Categories are pooled from the right until every
/// expected count is at least five; remaining probability mass is pooled
/// into the final category.
pub fn chi_square_gof_pvalue(observed: &[u64], probabilities: &[f64]) -> f64 {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mass: f64 = probabilities.iter().sum();
    // absorb unaccounted tail mass into the last cell
    let mut expected: Vec<f64> = probabilities.iter().map(|p| p * total as f64).collect();
    if let Some(last) = expected.last_mut() {
        *last += (1.0 - mass).max(0.0) * total as f64;
    }
    let mut obs: Vec<f64> = observed.iter().map(|&o| o as f64).collect();
    // pool small cells right-to-left
    let mut i = expected.len();
    while i > 1 {
        i -= 1;
        if expected[i] < 5.0 {
            expected[i - 1] += expected[i];
            obs[i - 1] += obs[i];
            expected.remove(i);
            obs.remove(i);
        }
    }
    if expected.len() < 2 {
        return 1.0;
    }
    let statistic: f64 = expected
        .iter()
        .zip(&obs)
        .map(|(&e, &o)| (o - e) * (o - e) / e)
        .sum();
    let df = (expected.len() - 1) as f64;
    let dist = statrs::distribution::ChiSquared::new(df).expect("positive df");
    1.0 - statrs::distribution::ContinuousCDF::cdf(&dist, statistic)
}

/// Two-sample chi-square p-value for two category-count vectors sharing the
/// same support (homogeneity test with pooling as above).
pub fn chi_square_two_sample_pvalue(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut cells: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64, y as f64))
        .collect();
    let (na, nb): (f64, f64) = (
        cells.iter().map(|c| c.0).sum(),
        cells.iter().map(|c| c.1).sum(),
    );
    // pool cells whose pooled expected count is small
    let mut i = cells.len();
    while i > 1 {
        i -= 1;
        let pooled = cells[i].0 + cells[i].1;
        if pooled * na.min(nb) / (na + nb) < 5.0 {
            cells[i - 1].0 += cells[i].0;
            cells[i - 1].1 += cells[i].1;
            cells.remove(i);
        }
    }
    if cells.len() < 2 {
        return 1.0;
    }
    let mut statistic = 0.0;
    for &(x, y) in &cells {
        let p = (x + y) / (na + nb);
        let (ea, eb) = (p * na, p * nb);
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let df = (cells.len() - 1) as f64;
    let dist = statrs::distribution::ChiSquared::new(df).expect("positive df");
    1.0 - statrs::distribution::ContinuousCDF::cdf(&dist, statistic)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_lse_matches_batch() {
        let xs = [-3.0, 1.5, 0.0, -100.0, 2.5];
        let mut acc = LogSumExp::new();
        for &x in &xs {
            acc.add(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-14);
    }

    #[test]
    fn lse_of_empty_is_neg_inf() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(LogSumExp::new().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_factorial_small_values() {
        assert!((ln_factorial(0) - 0.0).abs() < 1e-14);
        assert!((ln_factorial(5) - 120.0_f64.ln()).abs() < 1e-12);
    }
}
