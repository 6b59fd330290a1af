//! Moment-based estimation of the field parameters.
//!
//! The pair-correlation analogue for counts,
//! `N_i N_{i-ν} / (μ̂₀(i) μ̂₀(i-ν))` averaged over admissible day pairs, has
//! expectation `exp(σ² e^{-βν})` at lag `ν ≥ 1`. Minimum contrast minimises
//! the squared discrepancy over the first `m` lags; the search is a coarse
//! grid in `(σ², β)` followed by a Nelder-Mead refinement in log parameters.

use crate::error::{Error, Result};
use crate::lgcp::field::{DailyCounts, OuParams};

/// Average of `N_i N_{i-ν} / (μ̂₀(i) μ̂₀(i-ν))` over pairs with both days
/// observed. `mu0` holds per-day baseline values aligned with the series.
pub fn pair_corr_statistic(counts: &DailyCounts, mu0: &[f64], lag: usize) -> Result<f64> {
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    if mu0.len() != counts.len() {
        return Err(Error::InvalidData(
            "baseline and series lengths differ".into(),
        ));
    }
    let mut total = 0.0;
    let mut n_pairs = 0_usize;
    for i in lag..counts.len() {
        if !(counts.is_observed(i) && counts.is_observed(i - lag)) {
            continue;
        }
        let denom = mu0[i] * mu0[i - lag];
        if denom <= 0.0 {
            return Err(Error::InvalidData(format!(
                "baseline must be positive on used days (day {i})"
            )));
        }
        total += counts.counts()[i] as f64 * counts.counts()[i - lag] as f64 / denom;
        n_pairs += 1;
    }
    if n_pairs == 0 {
        return Err(Error::NoAdmissiblePairs { lag });
    }
    Ok(total / n_pairs as f64)
}

/// Theoretical pair-correlation value `exp(σ² e^{-βν})`.
pub fn pair_corr_theoretical(params: &OuParams, lag: usize) -> f64 {
    (params.sigma2 * (-params.beta * lag as f64).exp()).exp()
}

fn objective(stats: &[(usize, f64)], sigma2: f64, beta: f64) -> f64 {
    stats
        .iter()
        .map(|&(lag, s)| {
            let fitted = (sigma2 * (-beta * lag as f64).exp()).exp();
            (s - fitted).powi(2)
        })
        .sum()
}

/// Minimum-contrast fit from precomputed lag statistics `(lag, value)`.
pub fn fit_contrast(stats: &[(usize, f64)]) -> Result<OuParams> {
    if stats.len() < 2 {
        return Err(Error::InvalidData(
            "need statistics at two lags or more to identify two parameters".into(),
        ));
    }
    // coarse grid over σ² ∈ [0.01, 1], β ∈ [0.05, 3] in log space
    let mut best = (f64::INFINITY, 0.1_f64, 0.5_f64);
    let grid = 28;
    for i in 0..=grid {
        let sigma2 = (0.01_f64.ln()
            + (1.0_f64.ln() - 0.01_f64.ln()) * i as f64 / grid as f64)
            .exp();
        for j in 0..=grid {
            let beta = (0.05_f64.ln()
                + (3.0_f64.ln() - 0.05_f64.ln()) * j as f64 / grid as f64)
                .exp();
            let value = objective(stats, sigma2, beta);
            if value < best.0 {
                best = (value, sigma2, beta);
            }
        }
    }
    let start = [best.1.ln(), best.2.ln()];
    let refined = nelder_mead(
        |p| objective(stats, p[0].exp(), p[1].exp()),
        start,
        0.25,
        800,
    );
    OuParams::new(refined[0].exp(), refined[1].exp())
}

/// Minimum-contrast estimate of `(σ², β)` from the counts over lags
/// `1..=m`. Lags without admissible pairs are skipped; at least two usable
/// lags are required.
pub fn minimum_contrast(counts: &DailyCounts, mu0: &[f64], m: usize) -> Result<OuParams> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "need m >= 2 lags for two parameters".into(),
        ));
    }
    let mut stats = Vec::with_capacity(m);
    for lag in 1..=m {
        match pair_corr_statistic(counts, mu0, lag) {
            Ok(v) => stats.push((lag, v)),
            Err(Error::NoAdmissiblePairs { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    fit_contrast(&stats)
}

/// Two-dimensional Nelder-Mead with standard coefficients.
fn nelder_mead<F: Fn(&[f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    scale: f64,
    max_iter: usize,
) -> [f64; 2] {
    let mut simplex = [
        start,
        [start[0] + scale, start[1]],
        [start[0], start[1] + scale],
    ];
    let mut values = simplex.map(|p| f(&p));
    for _ in 0..max_iter {
        // order best → worst
        let mut order = [0_usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let (b, m, w) = (order[0], order[1], order[2]);
        let spread = (values[w] - values[b]).abs();
        let diameter = simplex
            .iter()
            .flat_map(|p| {
                simplex
                    .iter()
                    .map(move |q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
            })
            .fold(0.0_f64, f64::max);
        if spread < 1e-14 && diameter < 1e-9 {
            break;
        }
        let centroid = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[w][0]),
            centroid[1] + (centroid[1] - simplex[w][1]),
        ];
        let fr = f(&reflect);
        if fr < values[b] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[w][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[w][1]),
            ];
            let fe = f(&expand);
            if fe < fr {
                simplex[w] = expand;
                values[w] = fe;
            } else {
                simplex[w] = reflect;
                values[w] = fr;
            }
        } else if fr < values[m] {
            simplex[w] = reflect;
            values[w] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[w][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[w][1] - centroid[1]),
            ];
            let fc = f(&contract);
            if fc < values[w] {
                simplex[w] = contract;
                values[w] = fc;
            } else {
                // shrink toward the best vertex
                for idx in [m, w] {
                    simplex[idx] = [
                        simplex[b][0] + 0.5 * (simplex[idx][0] - simplex[b][0]),
                        simplex[b][1] + 0.5 * (simplex[idx][1] - simplex[b][1]),
                    ];
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }
    let mut order = [0_usize, 1, 2];
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
    simplex[order[0]]
}
