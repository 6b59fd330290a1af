//! Discretised Ornstein-Uhlenbeck log-intensity field and daily counts.
//!
//! The field satisfies the Markov recursion
//! `S(i) = -σ²/2 (1 - e^{-β}) + e^{-β} S(i-1) + σ Γ(i)` with `Γ(0)` standard
//! normal and later innovations of variance `1 - e^{-2β}`, equivalently the
//! discounted-sum closed form `S(i) = -σ²/2 + σ Σ_{j≤i} e^{-β(i-j)} Γ(j)`.
//! The mean offset makes `E[e^{S(i)}] = 1`, so a day's expected count equals
//! its baseline `μ₀(i)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ornstein-Uhlenbeck parameters: log-intensity variance `σ²` and per-day
/// decay rate `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    pub sigma2: f64,
    pub beta: f64,
}

impl OuParams {
    pub fn new(sigma2: f64, beta: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need sigma2 > 0 and beta > 0, got ({sigma2}, {beta})"
            )));
        }
        Ok(Self { sigma2, beta })
    }

    /// Innovation variance `1 - e^{-2β}` of `Γ(i)`, `i ≥ 1`.
    pub fn innovation_var(&self) -> f64 {
        1.0 - (-2.0 * self.beta).exp()
    }
}

/// Latent field: the innovations and the derived log-intensity path.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentField {
    pub gammas: Vec<f64>,
    pub s: Vec<f64>,
}

/// Log-intensity path from innovations via the Markov recursion.
pub fn field_from_gammas(params: &OuParams, gammas: &[f64]) -> LatentField {
    let mut s = Vec::with_capacity(gammas.len());
    let decay = (-params.beta).exp();
    let drift = -0.5 * params.sigma2 * (1.0 - decay);
    let sigma = params.sigma2.sqrt();
    for (i, &g) in gammas.iter().enumerate() {
        let value = if i == 0 {
            -0.5 * params.sigma2 + sigma * g
        } else {
            drift + decay * s[i - 1] + sigma * g
        };
        s.push(value);
    }
    LatentField {
        gammas: gammas.to_vec(),
        s,
    }
}

/// Closed-form value of `S(i)` as a discounted sum of innovations.
pub fn s_closed_form(params: &OuParams, gammas: &[f64], i: usize) -> f64 {
    let sigma = params.sigma2.sqrt();
    let mut acc = 0.0;
    for (j, &g) in gammas[..=i].iter().enumerate() {
        acc += (-params.beta * (i - j) as f64).exp() * g;
    }
    -0.5 * params.sigma2 + sigma * acc
}

/// Simulate the stationary field over `days` indices. Deterministic given
/// the seed.
pub fn simulate_field(params: &OuParams, days: usize, seed: u64) -> Result<LatentField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_field_with(params, days, &mut rng)
}

pub fn simulate_field_with<R: Rng + ?Sized>(
    params: &OuParams,
    days: usize,
    rng: &mut R,
) -> Result<LatentField> {
    if days == 0 {
        return Err(Error::InvalidParameter("need at least one day".into()));
    }
    let innovation_sd = params.innovation_var().sqrt();
    let gammas: Vec<f64> = (0..days)
        .map(|i| {
            let z: f64 = StandardNormal.sample(rng);
            if i == 0 {
                z
            } else {
                innovation_sd * z
            }
        })
        .collect();
    Ok(field_from_gammas(params, &gammas))
}

/// Conditionally independent Poisson counts with day intensity
/// `μ₀(i) e^{S(i)}`.
pub fn simulate_counts<R: Rng + ?Sized>(mu0: &[f64], s: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    if mu0.len() != s.len() {
        return Err(Error::InvalidParameter(
            "baseline and field lengths differ".into(),
        ));
    }
    mu0.iter()
        .zip(s)
        .map(|(&m, &si)| {
            if m < 0.0 {
                return Err(Error::InvalidParameter("negative baseline".into()));
            }
            let intensity = m * si.exp();
            if intensity == 0.0 {
                return Ok(0);
            }
            let draw: f64 = Poisson::new(intensity)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(rng);
            Ok(draw as u64)
        })
        .collect()
}

/// Daily counts with an observation mask; hidden days carry no count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyCounts {
    counts: Vec<u64>,
    observed: Vec<bool>,
}

impl DailyCounts {
    pub fn new(counts: Vec<u64>, observed: Vec<bool>) -> Result<Self> {
        if counts.len() != observed.len() {
            return Err(Error::InvalidData(
                "counts and mask lengths differ".into(),
            ));
        }
        if counts
            .iter()
            .zip(&observed)
            .any(|(&c, &obs)| !obs && c != 0)
        {
            return Err(Error::InvalidData("hidden days must carry no count".into()));
        }
        Ok(Self { counts, observed })
    }

    /// Fully observed series.
    pub fn fully_observed(counts: Vec<u64>) -> Self {
        let observed = vec![true; counts.len()];
        Self { counts, observed }
    }

    /// Copy with the day range `gap` masked out (counts zeroed).
    pub fn with_gap(&self, gap: std::ops::Range<usize>) -> Self {
        let mut counts = self.counts.clone();
        let mut observed = self.observed.clone();
        for i in gap {
            if i < counts.len() {
                counts[i] = 0;
                observed[i] = false;
            }
        }
        Self { counts, observed }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, day: usize) -> bool {
        self.observed.get(day).copied().unwrap_or(false)
    }

    pub fn n_observed(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    /// Indices of hidden days.
    pub fn hidden_days(&self) -> Vec<usize> {
        self.observed
            .iter()
            .enumerate()
            .filter_map(|(i, &o)| (!o).then_some(i))
            .collect()
    }

    /// Window-local slice over `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.len() {
            return Err(Error::InvalidData(format!(
                "slice {range:?} exceeds series length {}",
                self.len()
            )));
        }
        Ok(Self {
            counts: self.counts[range.clone()].to_vec(),
            observed: self.observed[range].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recursion_equals_closed_form() {
        let params = OuParams::new(0.3, 0.7).unwrap();
        let field = simulate_field(&params, 50, 4).unwrap();
        for i in 0..50 {
            let direct = s_closed_form(&params, &field.gammas, i);
            assert!(
                (field.s[i] - direct).abs() < 1e-12,
                "day {i}: {} vs {direct}",
                field.s[i]
            );
        }
    }

    #[test]
    fn vanishing_variance_flattens_field() {
        let params = OuParams::new(1e-18, 0.7).unwrap();
        let field = simulate_field(&params, 30, 4).unwrap();
        assert!(field.s.iter().all(|&s| s.abs() < 1e-8));
    }

    #[test]
    fn stationary_variance_and_lognormal_mean() {
        // Var S(i) = σ² for every i and E e^S = 1, MC over 10^5 draws
        let params = OuParams::new(0.25, 0.6).unwrap();
        let reps = 100_000;
        let day = 7_usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut exp_sum = 0.0;
        let mut exp_sumsq = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..reps {
            let field = simulate_field_with(&params, day + 1, &mut rng).unwrap();
            let s = field.s[day];
            sum += s;
            sumsq += s * s;
            let e = s.exp();
            exp_sum += e;
            exp_sumsq += e * e;
        }
        let n = reps as f64;
        let mean = sum / n;
        let var = sumsq / n - mean * mean;
        let var_se = params.sigma2 * (2.0 / n).sqrt();
        assert!(
            (var - params.sigma2).abs() < 3.0 * var_se,
            "var {var} vs {} ± {}",
            params.sigma2,
            3.0 * var_se
        );
        let exp_mean = exp_sum / n;
        let exp_var = exp_sumsq / n - exp_mean * exp_mean;
        let exp_se = (exp_var / n).sqrt();
        assert!(
            (exp_mean - 1.0).abs() < 3.0 * exp_se,
            "E e^S = {exp_mean} ± {exp_se}"
        );
    }

    #[test]
    fn counts_zero_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let counts = simulate_counts(&[0.0; 10], &[0.1; 10], &mut rng).unwrap();
        assert!(counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn counts_poisson_degeneracy() {
        // flat field, constant baseline m: i.i.d. Poisson(m)
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = 9.0;
        let counts = simulate_counts(&[m; 4000], &[0.0; 4000], &mut rng).unwrap();
        let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        let se = (m / counts.len() as f64).sqrt();
        assert!((mean - m).abs() < 4.0 * se, "{mean} vs {m}");
    }

    #[test]
    fn counts_mean_matches_baseline_through_field() {
        // tower property: E N_i = μ₀(i) since E e^S = 1
        let params = OuParams::new(0.2, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 10.0;
        let reps = 20_000;
        let mut total = 0_u64;
        for _ in 0..reps {
            let field = simulate_field_with(&params, 3, &mut rng).unwrap();
            let counts = simulate_counts(&[m; 3], &field.s, &mut rng).unwrap();
            total += counts[2];
        }
        let mean = total as f64 / reps as f64;
        // Var N = E[Var(N|S)] + Var(E[N|S]) = m + m²(e^{σ²}-1)
        let var = m + m * m * (params.sigma2.exp() - 1.0);
        let se = (var / reps as f64).sqrt();
        assert!((mean - m).abs() < 3.5 * se, "{mean} vs {m} ± {se}");
    }

    #[test]
    fn masking_invariants() {
        let counts = DailyCounts::fully_observed(vec![3, 1, 4, 1, 5]);
        let masked = counts.with_gap(1..3);
        assert_eq!(masked.counts(), &[3, 0, 0, 1, 5]);
        assert_eq!(masked.hidden_days(), vec![1, 2]);
        assert!(DailyCounts::new(vec![1, 2], vec![true, false]).is_err());
    }
}
