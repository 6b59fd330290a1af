//! Birth/death Metropolis-Hastings sampling of the gap configuration.
//!
//! With probability one half a birth is proposed (a uniform point in the
//! gap, inserted at its chronological position), otherwise a death (a
//! uniformly chosen point). A birth is accepted with probability
//! `min{1, λ_i(u | t⃗) L / (n+1)}` and a death with the reciprocal form,
//! where `L` is the gap length; a death proposal from the empty state does
//! nothing. Started from a positive-density state, the chain never visits a
//! zero-density state.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::OrderedConfig;
use crate::samplers::{ChainConfig, GapTarget};

/// One Metropolis-Hastings update, value-in value-out.
pub fn mh_step<T: GapTarget, R: Rng + ?Sized>(
    target: &T,
    gap: &OrderedConfig,
    rng: &mut R,
) -> OrderedConfig {
    let mut state = gap.clone();
    mh_step_in_place(target, &mut state, rng);
    state
}

fn mh_step_in_place<T: GapTarget, R: Rng + ?Sized>(
    target: &T,
    gap: &mut OrderedConfig,
    rng: &mut R,
) {
    let (t1, t2) = (target.window().t1(), target.window().t2());
    let gap_len = t2 - t1;
    let n = gap.len();
    if rng.random::<f64>() < 0.5 {
        // birth
        let u = t1 + gap_len * rng.random::<f64>();
        let Ok(position) = gap.insertion_index(u) else {
            return; // proposal collided with an existing point
        };
        let accept = target.intensity(gap, u) * gap_len / (n as f64 + 1.0);
        if rng.random::<f64>() < accept {
            gap.insert_in_place(position, u);
        }
    } else {
        // death; nothing happens from the empty sequence
        if n == 0 {
            return;
        }
        let index = rng.random_range(0..n);
        let removed = gap.remove_in_place(index);
        let accept = n as f64 / (target.intensity(gap, removed) * gap_len);
        if rng.random::<f64>() >= accept {
            gap.insert_in_place(index, removed);
        }
    }
}

/// Run the chain from the empty gap (feasible for hereditary targets):
/// `burn_in` steps, then `n_samples` states taken every `thin` steps.
/// Deterministic given the seed.
pub fn run_mh<T: GapTarget>(target: &T, chain: &ChainConfig) -> Vec<OrderedConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(chain.seed);
    let mut state = OrderedConfig::empty();
    for _ in 0..chain.burn_in {
        mh_step_in_place(target, &mut state, &mut rng);
    }
    let mut samples = Vec::with_capacity(chain.n_samples as usize);
    for _ in 0..chain.n_samples {
        for _ in 0..chain.thin {
            mh_step_in_place(target, &mut state, &mut rng);
        }
        samples.push(state.clone());
    }
    samples
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BrokenWindow;
    use crate::renewal::ErlangModel;
    use crate::samplers::RenewalGapTarget;

    fn poisson_target(rate: f64) -> RenewalGapTarget {
        let model = ErlangModel::new(rate, 1, 4.0).unwrap();
        let window = BrokenWindow::new(1.0, 3.0, 4.0).unwrap();
        RenewalGapTarget::new(
            model,
            window,
            &OrderedConfig::new(vec![0.5]).unwrap(),
            &OrderedConfig::new(vec![3.5]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn death_from_empty_is_a_no_op() {
        let target = poisson_target(2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let empty = OrderedConfig::empty();
        // force enough steps that death proposals certainly occur
        let mut visited_empty_death = false;
        let mut state = empty.clone();
        for _ in 0..64 {
            let before = state.clone();
            let coin_rng = rng.clone();
            state = mh_step(&target, &state, &mut rng);
            if before.is_empty() {
                let mut probe = coin_rng;
                if probe.random::<f64>() >= 0.5 {
                    visited_empty_death = true;
                    assert_eq!(state, before);
                }
            }
        }
        assert!(visited_empty_death);
    }

    #[test]
    fn single_step_run_matches_manual_step() {
        let target = poisson_target(2.0);
        let chain = ChainConfig::new(0, 1, 1, 42).unwrap();
        let run = run_mh(&target, &chain);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let manual = mh_step(&target, &OrderedConfig::empty(), &mut rng);
        assert_eq!(run, vec![manual]);
    }

    #[test]
    fn runs_are_deterministic_given_seed() {
        let target = poisson_target(2.0);
        let chain = ChainConfig::new(50, 5, 20, 7).unwrap();
        assert_eq!(run_mh(&target, &chain), run_mh(&target, &chain));
    }

    #[test]
    fn detailed_balance_algebra() {
        // density(gap)·P(gap → gap ∪ u) = density(gap ∪ u)·P(gap ∪ u → gap),
        // expressed through the intensity λ = density ratio
        let target = poisson_target(2.0);
        let gap_len = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(0..5_usize);
            let mut pts: Vec<f64> = (0..n).map(|_| 1.0 + 2.0 * rng.random::<f64>()).collect();
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let gap = OrderedConfig::new(pts).unwrap();
            let u = 1.0 + 2.0 * rng.random::<f64>();
            if gap.insertion_index(u).is_err() {
                continue;
            }
            let lam = target.intensity(&gap, u);
            let n = gap.len() as f64;
            let forward = 0.5 * (1.0 / gap_len) * (lam * gap_len / (n + 1.0)).min(1.0);
            let backward = 0.5 * (1.0 / (n + 1.0)) * ((n + 1.0) / (lam * gap_len)).min(1.0);
            // density(gap ∪ u) / density(gap) = lam
            assert!(
                crate::numeric::rel_diff(forward, lam * backward) < 1e-10,
                "u = {u}"
            );
        }
    }

    #[test]
    fn birth_with_large_intensity_always_accepted() {
        // λ L / (n+1) ≥ 1 clamps at one: every birth proposal is accepted
        let target = poisson_target(50.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut state = OrderedConfig::empty();
        for _ in 0..100 {
            let before_len = state.len();
            let mut probe = rng.clone();
            let birth = probe.random::<f64>() < 0.5;
            state = mh_step(&target, &state, &mut rng);
            if birth && before_len < 20 {
                // λL/(n+1) = 50·2/(n+1) ≥ 1 whenever n < 99
                assert_eq!(state.len(), before_len + 1);
            }
        }
    }
}
