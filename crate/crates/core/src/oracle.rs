//! Brute-force quadrature oracles for the marginal and conditional
//! distributions of a process observed through a broken window.
//!
//! The marginal Janossy density of the observed restriction is the sum over
//! hidden counts `n` of `e^{-T} ∫_{H_n((T1,T2))} f(left ‖ t ‖ right) dt`.
//! Each simplex integral is evaluated deterministically on the ordered grid
//! of cell midpoints, volume-normalised: `vol(H_n) · mean(f over ordered
//! combinations)`, which is exact for location-free integrands. These
//! oracles exist to validate the closed-form model paths on small instances;
//! they are not performance-engineered, and combinatorially large budgets
//! are rejected up front.

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::model::SequentialDensity;
use crate::numeric::{ln_factorial, LogSumExp};

/// Ceiling on the total number of density evaluations an oracle call may
/// request (sum of C(quad_points, n) over the truncation range).
pub const COST_CEILING: u64 = 50_000_000;

/// Truncation cap for the adaptive hidden-count sum.
pub const TRUNCATION_CAP: usize = 20;

/// A term is negligible once it falls below this fraction of the running sum.
pub const TERM_RELATIVE_FLOOR: f64 = 1e-12;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn check_budget(quad_points: usize, n_max: usize) -> Result<()> {
    if quad_points < 2 {
        return Err(Error::InvalidParameter(
            "quad_points must be at least 2".into(),
        ));
    }
    if n_max > quad_points {
        return Err(Error::InvalidParameter(format!(
            "n_max {n_max} exceeds quad_points {quad_points}: ordered grid tuples do not exist"
        )));
    }
    let mut evals: u64 = 0;
    for n in 0..=n_max {
        evals = evals.saturating_add(binomial(quad_points as u64, n as u64));
    }
    if evals > COST_CEILING {
        return Err(Error::BudgetExceeded {
            evals,
            ceiling: COST_CEILING,
        });
    }
    Ok(())
}

/// Log of one hidden-count term:
/// `ln( e^{-T} ∫_{H_n} f(left ‖ t ‖ right) dt )`.
fn log_term(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    n: usize,
    quad_points: usize,
) -> f64 {
    let horizon = model.horizon();
    if n == 0 {
        let joined = concat_observed(left, right);
        return model.log_density(&joined) - horizon;
    }
    let gap_len = window.gap_len();
    let h = gap_len / quad_points as f64;
    let grid: Vec<f64> = (0..quad_points)
        .map(|i| window.t1() + (i as f64 + 0.5) * h)
        .collect();

    // scratch configuration: left ‖ n slots ‖ right, slots rewritten per combo
    let mut scratch = OrderedConfig::from_sorted(Vec::new());
    {
        let times = scratch.times_mut();
        times.extend_from_slice(left.times());
        times.extend(grid.iter().take(n));
        times.extend_from_slice(right.times());
    }
    let offset = left.len();

    let mut combo: Vec<usize> = (0..n).collect();
    let mut lse = LogSumExp::new();
    let mut count: u64 = 0;
    loop {
        {
            let times = scratch.times_mut();
            for (slot, &g) in combo.iter().enumerate() {
                times[offset + slot] = grid[g];
            }
        }
        lse.add(model.log_density(&scratch));
        count += 1;
        if !advance_combination(&mut combo, quad_points) {
            break;
        }
    }
    // vol(H_n) · mean(f) · e^{-T}
    n as f64 * gap_len.ln() - ln_factorial(n as u64) + lse.value() - (count as f64).ln()
        - horizon
}

fn concat_observed(left: &OrderedConfig, right: &OrderedConfig) -> OrderedConfig {
    let mut times = Vec::with_capacity(left.len() + right.len());
    times.extend_from_slice(left.times());
    times.extend_from_slice(right.times());
    OrderedConfig::from_sorted(times)
}

fn advance_combination(combo: &mut [usize], q: usize) -> bool {
    let n = combo.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if combo[i] < q - (n - i) {
            combo[i] += 1;
            for j in (i + 1)..n {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Log marginal Janossy density of the observed pair, truncated at `n_max`.
pub fn log_marginal_janossy_oracle(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    n_max: usize,
    quad_points: usize,
) -> Result<f64> {
    check_budget(quad_points, n_max)?;
    let mut lse = LogSumExp::new();
    for n in 0..=n_max {
        lse.add(log_term(model, window, left, right, n, quad_points));
    }
    Ok(lse.value())
}

/// Marginal Janossy density of observing `left` and `right` with the gap
/// integrated out, truncated at `n_max` hidden points. Monotone
/// non-decreasing in `n_max`.
pub fn marginal_janossy_oracle(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    n_max: usize,
    quad_points: usize,
) -> Result<f64> {
    Ok(log_marginal_janossy_oracle(model, window, left, right, n_max, quad_points)?.exp())
}

/// Adaptive variant: extends the hidden-count sum until a term drops below
/// [`TERM_RELATIVE_FLOOR`] of the running sum, capped at [`TRUNCATION_CAP`].
/// Returns the log value and the largest `n` evaluated.
pub fn log_marginal_janossy_adaptive(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    quad_points: usize,
) -> Result<(f64, usize)> {
    let mut lse = LogSumExp::new();
    let mut used = 0;
    let mut evals: u64 = 0;
    for n in 0..=TRUNCATION_CAP {
        check_budget(quad_points, n)?;
        evals = evals.saturating_add(binomial(quad_points as u64, n as u64));
        if evals > COST_CEILING {
            return Err(Error::BudgetExceeded {
                evals,
                ceiling: COST_CEILING,
            });
        }
        let term = log_term(model, window, left, right, n, quad_points);
        lse.add(term);
        used = n;
        if n > 0 && term < lse.value() + TERM_RELATIVE_FLOOR.ln() {
            break;
        }
    }
    Ok((lse.value(), used))
}

/// Conditional Janossy density of the gap configuration given the observed
/// pair: `e^{-T} f(left ‖ gap ‖ right) / j^Z(left, right)`. Zero off the
/// ordered carrier; an error when the marginal is numerically zero.
pub fn conditional_density_oracle(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    gap: &OrderedConfig,
    n_max: usize,
    quad_points: usize,
) -> Result<f64> {
    let log_marginal =
        log_marginal_janossy_oracle(model, window, left, right, n_max, quad_points)?;
    if log_marginal == f64::NEG_INFINITY {
        return Err(Error::InfeasibleConditioning);
    }
    if !gap.times().iter().all(|&t| window.in_gap(t)) {
        return Ok(0.0);
    }
    let joined = OrderedConfig::concat(&[left, gap, right])?;
    Ok((model.log_density(&joined) - model.horizon() - log_marginal).exp())
}

/// Conditional distribution of the hidden-point count, truncated at `n_max`
/// and renormalised: entry `n` is the mass of exactly `n` hidden points.
pub fn gap_count_pmf_oracle(
    model: &impl SequentialDensity,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
    n_max: usize,
    quad_points: usize,
) -> Result<Vec<f64>> {
    check_budget(quad_points, n_max)?;
    let terms: Vec<f64> = (0..=n_max)
        .map(|n| log_term(model, window, left, right, n, quad_points))
        .collect();
    let total = crate::numeric::log_sum_exp(&terms);
    if total == f64::NEG_INFINITY {
        return Err(Error::InfeasibleConditioning);
    }
    Ok(terms.iter().map(|t| (t - total).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::ErlangModel;
    use approx::assert_relative_eq;

    fn cfg(ts: &[f64]) -> OrderedConfig {
        OrderedConfig::new(ts.to_vec()).unwrap()
    }

    #[test]
    fn poisson_marginal_closed_form() {
        // restriction of a Poisson process is Poisson on the observed region:
        // j^Z = λ^{k+l} e^{-λ(T - T2 + T1)}
        let model = ErlangModel::new(1.5, 1, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.4, 0.9]);
        let right = cfg(&[2.3]);
        let expect = 1.5_f64.powi(3) * (-1.5 * window.observed_len()).exp();
        let got = marginal_janossy_oracle(&model, &window, &left, &right, 14, 16).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-9);
    }

    #[test]
    fn truncation_at_zero_is_first_term() {
        let model = ErlangModel::new(1.5, 1, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.4, 0.9]);
        let right = cfg(&[2.3]);
        let joined = OrderedConfig::concat(&[&left, &right]).unwrap();
        let expect = (model.log_density(&joined) - 3.0).exp();
        let got = marginal_janossy_oracle(&model, &window, &left, &right, 0, 16).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-12);
    }

    #[test]
    fn marginal_monotone_in_truncation() {
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.5]);
        let right = cfg(&[2.5]);
        let mut prev = 0.0;
        for n_max in 0..7 {
            let v = marginal_janossy_oracle(&model, &window, &left, &right, n_max, 48).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn budget_rejected_for_combinatorial_requests() {
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let e = OrderedConfig::empty();
        let err = marginal_janossy_oracle(&model, &window, &e, &e, 8, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(marginal_janossy_oracle(&model, &window, &e, &e, 4, 1).is_err());
    }

    #[test]
    fn conditional_empty_gap_is_first_term_over_marginal() {
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.5]);
        let right = cfg(&[2.5]);
        let marginal =
            marginal_janossy_oracle(&model, &window, &left, &right, 6, 32).unwrap();
        let joined = OrderedConfig::concat(&[&left, &right]).unwrap();
        let expect = (model.log_density(&joined) - 3.0).exp() / marginal;
        let got = conditional_density_oracle(
            &model,
            &window,
            &left,
            &right,
            &OrderedConfig::empty(),
            6,
            32,
        )
        .unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-12);
    }

    #[test]
    fn conditional_poisson_closed_form() {
        // for a Poisson process the gap is Poisson(λ) on (T1,T2):
        // j_n(gap | ·) = λ^n e^{-λ (T2-T1)}
        let model = ErlangModel::new(1.5, 1, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.4]);
        let right = cfg(&[2.2, 2.9]);
        let gap = cfg(&[1.3, 1.8]);
        let got =
            conditional_density_oracle(&model, &window, &left, &right, &gap, 14, 16).unwrap();
        let expect = 1.5_f64.powi(2) * (-1.5_f64).exp();
        assert_relative_eq!(got, expect, max_relative = 1e-9);
    }

    #[test]
    fn conditional_vanishes_off_gap_carrier() {
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let got = conditional_density_oracle(
            &model,
            &window,
            &cfg(&[0.5]),
            &cfg(&[2.5]),
            &cfg(&[0.7]),
            6,
            32,
        )
        .unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn conditional_ratio_equals_model_papangelou() {
        // Papangelou consistency: oracle ratio = model conditional intensity,
        // exactly (the marginal cancels), for every insert position
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let left = cfg(&[0.5, 0.9]);
        let right = cfg(&[2.2]);
        let gap = cfg(&[1.4, 1.7]);
        for t in [1.2, 1.5, 1.9] {
            let base = conditional_density_oracle(
                &model, &window, &left, &right, &gap, 6, 32,
            )
            .unwrap();
            let (gap_t, _) = gap.insert(t).unwrap();
            let with_t = conditional_density_oracle(
                &model, &window, &left, &right, &gap_t, 6, 32,
            )
            .unwrap();
            let lam = model
                .conditional_papangelou(&window, &left, &right, &gap, t)
                .unwrap();
            assert!(
                crate::numeric::rel_diff(with_t / base, lam) < 1e-10,
                "t = {t}"
            );
        }
    }

    #[test]
    fn adaptive_truncation_stops_early() {
        let model = ErlangModel::new(1.5, 1, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let (log_v, used) =
            log_marginal_janossy_adaptive(&model, &window, &cfg(&[0.4]), &cfg(&[2.2]), 18)
                .unwrap();
        assert!(used < TRUNCATION_CAP, "used = {used}");
        let full =
            log_marginal_janossy_oracle(&model, &window, &cfg(&[0.4]), &cfg(&[2.2]), used, 18)
                .unwrap();
        assert_relative_eq!(log_v, full, max_relative = 1e-12);
    }

    #[test]
    fn gap_count_pmf_sums_to_one() {
        let model = ErlangModel::new(2.0, 2, 3.0).unwrap();
        let window = BrokenWindow::new(1.0, 2.0, 3.0).unwrap();
        let pmf =
            gap_count_pmf_oracle(&model, &window, &cfg(&[0.5]), &cfg(&[2.5]), 6, 32).unwrap();
        assert_relative_eq!(pmf.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert!(pmf.iter().all(|&p| p >= 0.0));
    }
}
