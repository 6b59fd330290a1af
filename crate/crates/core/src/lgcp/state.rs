//! State estimation for the latent field: conditional log density over the
//! innovations, its gradient, and a Langevin-type Metropolis-Hastings chain.
//!
//! Up to an additive constant, the conditional log density of the
//! innovations `γ` given counts on the influence days is
//! `-γ(0)²/2 - Σ_{i≥1} γ(i)²/(2(1-e^{-2β})) + Σ_{i∈I} [n(i) S_γ(i) - μ₀(i) e^{S_γ(i)}]`,
//! with `S_γ` the discounted innovation sum. The proposal is multivariate
//! normal with independent components of variance `h` centred at the current
//! state plus `h/2` times the gradient, accepted by the asymmetric
//! Metropolis-Hastings ratio.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lgcp::field::{field_from_gammas, DailyCounts, OuParams};

/// Conditional log density (constant dropped) and its gradient in the
/// innovations. `counts` and `mu0` are indexed by the same day range as
/// `gammas`; `influence_days` must point at observed days.
pub fn conditional_logpdf_and_grad(
    gammas: &[f64],
    counts: &DailyCounts,
    mu0: &[f64],
    params: &OuParams,
    influence_days: &[usize],
) -> (f64, Vec<f64>) {
    let days = gammas.len();
    debug_assert!(mu0.len() >= days && counts.len() >= days);
    debug_assert!(influence_days.iter().all(|&i| i < days && counts.is_observed(i)));

    let field = field_from_gammas(params, gammas);
    let innovation_var = params.innovation_var();
    let sigma = params.sigma2.sqrt();
    let decay = (-params.beta).exp();

    let mut value = -0.5 * gammas[0] * gammas[0];
    for &g in &gammas[1..] {
        value -= g * g / (2.0 * innovation_var);
    }
    // data term weights w_i = n(i) - μ₀(i) e^{S(i)} on influence days
    let mut weights = vec![0.0; days];
    for &i in influence_days {
        let s = field.s[i];
        let intensity = mu0[i] * s.exp();
        value += counts.counts()[i] as f64 * s - intensity;
        weights[i] = counts.counts()[i] as f64 - intensity;
    }

    // ∂S(i)/∂γ(j) = σ e^{-β(i-j)} for j ≤ i: backward discounted sums
    let mut grad = vec![0.0; days];
    let mut acc = 0.0;
    for j in (0..days).rev() {
        acc = acc * decay + weights[j];
        let prior = if j == 0 {
            -gammas[0]
        } else {
            -gammas[j] / innovation_var
        };
        grad[j] = prior + sigma * acc;
    }
    // acc telescopes backwards: multiply by decay once per step down
    (value, grad)
}

/// Current chain position with its cached target value and gradient.
#[derive(Debug, Clone)]
pub struct MalaState {
    pub gammas: Vec<f64>,
    pub log_pdf: f64,
    pub grad: Vec<f64>,
}

impl MalaState {
    pub fn new<F>(gammas: Vec<f64>, target: &F) -> Self
    where
        F: Fn(&[f64]) -> (f64, Vec<f64>),
    {
        let (log_pdf, grad) = target(&gammas);
        Self {
            gammas,
            log_pdf,
            grad,
        }
    }
}

fn log_proposal_density(from: &MalaState, to: &[f64], step: f64) -> f64 {
    let mut acc = 0.0;
    for ((&x, &g), &y) in from.gammas.iter().zip(&from.grad).zip(to) {
        let mean = x + 0.5 * step * g;
        acc -= (y - mean) * (y - mean) / (2.0 * step);
    }
    acc
}

/// One Langevin proposal and accept/reject decision. Returns the next state
/// and whether the proposal was accepted.
pub fn mala_step<F, R>(
    state: &MalaState,
    target: &F,
    step: f64,
    rng: &mut R,
) -> (MalaState, bool)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    R: Rng + ?Sized,
{
    let sd = step.sqrt();
    let proposal: Vec<f64> = state
        .gammas
        .iter()
        .zip(&state.grad)
        .map(|(&x, &g)| {
            let z: f64 = StandardNormal.sample(rng);
            x + 0.5 * step * g + sd * z
        })
        .collect();
    let candidate = MalaState::new(proposal, target);
    let log_ratio = candidate.log_pdf - state.log_pdf
        + log_proposal_density(&candidate, &state.gammas, step)
        - log_proposal_density(state, &candidate.gammas, step);
    if rng.random::<f64>().ln() < log_ratio {
        (candidate, true)
    } else {
        (state.clone(), false)
    }
}

/// Thinned Langevin run from `init`. Records every `thin`-th state after
/// `burn_in` steps; deterministic given the seed.
pub struct MalaRun {
    pub draws: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn run_mala<F>(
    init: Vec<f64>,
    target: &F,
    step: f64,
    burn_in: u64,
    thin: u64,
    n_samples: u64,
    seed: u64,
) -> Result<MalaRun>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    if step <= 0.0 || thin == 0 || n_samples == 0 {
        return Err(Error::InvalidParameter(
            "need step > 0, thin > 0, n_samples > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = MalaState::new(init, target);
    let mut accepted = 0_u64;
    let mut total = 0_u64;
    for _ in 0..burn_in {
        let (next, acc) = mala_step(&state, target, step, &mut rng);
        state = next;
        accepted += u64::from(acc);
        total += 1;
    }
    let mut draws = Vec::with_capacity(n_samples as usize);
    for _ in 0..n_samples {
        for _ in 0..thin {
            let (next, acc) = mala_step(&state, target, step, &mut rng);
            state = next;
            accepted += u64::from(acc);
            total += 1;
        }
        draws.push(state.gammas.clone());
    }
    Ok(MalaRun {
        draws,
        acceptance_rate: accepted as f64 / total as f64,
    })
}

/// Posterior summary of the total intensity over the gap days.
#[derive(Debug, Clone)]
pub struct GapIntensityPosterior {
    pub totals: Vec<f64>,
    pub mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

/// Per-draw total gap intensity `Σ_{i∈gap} μ₀(i) e^{S(i)}` and its summary.
pub fn gap_intensity_posterior(
    draws: &[Vec<f64>],
    params: &OuParams,
    mu0: &[f64],
    gap_days: &[usize],
) -> Result<GapIntensityPosterior> {
    if draws.is_empty() {
        return Err(Error::InvalidData("no chain draws".into()));
    }
    let totals: Vec<f64> = draws
        .iter()
        .map(|gammas| {
            let field = field_from_gammas(params, gammas);
            gap_days.iter().map(|&i| mu0[i] * field.s[i].exp()).sum()
        })
        .collect();
    let mut sorted = totals.clone();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    };
    Ok(GapIntensityPosterior {
        mean: totals.iter().sum::<f64>() / totals.len() as f64,
        q05: quantile(0.05),
        q50: quantile(0.5),
        q95: quantile(0.95),
        totals,
    })
}

/// Influence days: observed days within `reach` of the hidden gap.
pub fn influence_days(counts: &DailyCounts, reach: usize) -> Vec<usize> {
    let hidden = counts.hidden_days();
    let mut days: Vec<usize> = Vec::new();
    for i in 0..counts.len() {
        if !counts.is_observed(i) {
            continue;
        }
        if hidden
            .iter()
            .any(|&h| i.abs_diff(h) <= reach)
        {
            days.push(i);
        }
    }
    days
}
