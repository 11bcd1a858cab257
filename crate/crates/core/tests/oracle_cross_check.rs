#![allow(clippy::needless_range_loop)]

use agr_core::oracle::{exact_belief_values, greedy_action, solve_mdp_exact, EnumerablePomdp, FiniteMdp};
use agr_core::{ParticleBelief, Planner, PlannerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Second evaluator: carries unnormalized beliefs through the recursion, so
/// the observation probability is folded into the weights instead of being
/// divided out. Values scale linearly in the weights.
fn unnormalized_value(pomdp: &EnumerablePomdp, weights: &[f64], action: usize, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let n = pomdp.state_count();
    let mut total = 0.0;
    for s in 0..n {
        for s2 in 0..n {
            total += weights[s] * pomdp.transition(s, action, s2) * pomdp.reward(s, action, s2);
        }
    }
    for o in 0..pomdp.observation_count() {
        let next: Vec<f64> = (0..n)
            .map(|s2| {
                (0..n).map(|s| weights[s] * pomdp.transition(s, action, s2)).sum::<f64>()
                    * pomdp.observation_prob(action, s2, o)
            })
            .collect();
        let best = (0..pomdp.action_count())
            .map(|a| unnormalized_value(pomdp, &next, a, depth - 1))
            .fold(f64::NEG_INFINITY, f64::max);
        total += pomdp.gamma() * best;
    }
    total
}

fn sensor() -> EnumerablePomdp {
    EnumerablePomdp::noisy_sensor(0.85, 0.1, 0.5).unwrap()
}

#[test]
fn exact_values_match_the_unnormalized_expansion() {
    let pomdp = sensor();
    for belief in [[0.5, 0.5], [0.2, 0.8], [1.0, 0.0]] {
        for depth in 1..=5 {
            let exact = exact_belief_values(&pomdp, &belief, depth).unwrap();
            for (a, v) in exact.iter().enumerate() {
                let other = unnormalized_value(&pomdp, &belief, a, depth);
                assert!((v - other).abs() < 1e-12, "belief {belief:?} depth {depth} action {a}: {v} vs {other}");
            }
        }
    }
}

#[test]
fn frozen_depth_three_values() {
    // First step pays 1/2 either way. After any reading the favoured side
    // holds with 0.85; acting on it pays 0.85 now and, after drift and a
    // second reading, max(posterior) averages back to 0.85.
    // 0.5 + 0.5 * (0.85 + 0.5 * 0.85) = 1.1375 for both actions.
    let v = exact_belief_values(&sensor(), &[0.5, 0.5], 3).unwrap();
    for q in v {
        assert!((q - 1.1375).abs() < 1e-12);
    }
}

#[test]
fn tree_search_agrees_with_exact_values_at_depth_three() {
    let pomdp = sensor();
    let exact = exact_belief_values(&pomdp, &[0.5, 0.5], 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let belief = ParticleBelief::from_initial(&pomdp, 1000, &mut rng).unwrap();
    let config = PlannerConfig { num_simulations: 20_000, ucb_c: 1.0, gamma: 0.5, max_depth: 3, ..Default::default() };
    let mut planner = Planner::new(&pomdp, config).unwrap();
    planner.plan(&pomdp, &belief, &mut rng).unwrap();
    for (record, v) in planner.root().records().iter().zip(&exact) {
        assert!((record.value - v).abs() < 0.1, "{} vs {v}", record.value);
    }
}

#[test]
fn shaping_keeps_greedy_policies_on_random_mdps() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let states = rng.random_range(2..=20);
        let mdp = FiniteMdp::random(states, 3, &mut rng);
        let phi: Vec<f64> = (0..states).map(|_| rng.random_range(-3.0..3.0)).collect();
        let plain = solve_mdp_exact(&mdp, 0.95, 30, None, 10.0).unwrap();
        let shaped = solve_mdp_exact(&mdp, 0.95, 30, Some(&phi), 10.0).unwrap();
        for s in (0..states).filter(|&s| !mdp.terminal[s]) {
            assert_eq!(greedy_action(&plain[s], 1e-9), greedy_action(&shaped[s], 1e-9));
        }
    }
}
