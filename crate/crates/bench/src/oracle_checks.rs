//! Checks of the planner against exact solvers on problems small enough to
//! enumerate.

use agr_core::oracle::{exact_belief_values, greedy_action, solve_mdp_exact, EnumerablePomdp, FiniteMdp};
use agr_core::{ParticleBelief, Planner, PlannerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeCheck {
    pub depths: Vec<usize>,
    pub seeds: Vec<u64>,
    pub simulations: usize,
    pub tolerance: f64,
    /// Two-state sensor: reading accuracy, per-step drift, discount.
    pub accuracy: f64,
    pub drift: f64,
    pub gamma: f64,
    pub ucb_c: f64,
}

impl Default for TreeCheck {
    fn default() -> Self {
        Self {
            depths: vec![3, 4, 5],
            seeds: (0..5).collect(),
            simulations: 100_000,
            tolerance: 0.1,
            accuracy: 0.85,
            drift: 0.1,
            gamma: 0.5,
            ucb_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeCheckRow {
    pub depth: usize,
    pub seed: u64,
    pub exact: Vec<f64>,
    pub estimated: Vec<f64>,
}

impl TreeCheckRow {
    pub fn max_error(&self) -> f64 {
        self.exact.iter().zip(&self.estimated).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Root action values from tree search next to the exact values, for every
/// depth and seed.
pub fn tree_search_against_exact(check: &TreeCheck) -> Result<Vec<TreeCheckRow>> {
    let pomdp = EnumerablePomdp::noisy_sensor(check.accuracy, check.drift, check.gamma)?;
    let prior = pomdp.initial_belief().to_vec();
    let mut rows = Vec::new();
    for &depth in &check.depths {
        let exact = exact_belief_values(&pomdp, &prior, depth)?;
        for &seed in &check.seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let belief = ParticleBelief::from_initial(&pomdp, 1000, &mut rng)?;
            let config = PlannerConfig {
                num_simulations: check.simulations,
                ucb_c: check.ucb_c,
                gamma: check.gamma,
                max_depth: depth,
                ..PlannerConfig::default()
            };
            let mut planner = Planner::new(&pomdp, config)?;
            planner.plan(&pomdp, &belief, &mut rng)?;
            let estimated = planner.root().records().iter().map(|r| r.value).collect();
            rows.push(TreeCheckRow { depth, seed, exact: exact.clone(), estimated });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapingCheck {
    pub mdps: usize,
    pub max_states: usize,
    pub actions: usize,
    pub gamma: f64,
    pub horizon: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for ShapingCheck {
    fn default() -> Self {
        Self { mdps: 100, max_states: 20, actions: 3, gamma: 0.95, horizon: 50, alpha: 10.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShapingOutcome {
    pub mdps: usize,
    pub states_compared: usize,
    pub mismatches: usize,
}

/// Greedy policies with and without a random point potential, compared at
/// every non-terminal state of random MDPs.
pub fn shaping_preserves_policies(check: &ShapingCheck) -> Result<ShapingOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let mut outcome = ShapingOutcome { mdps: check.mdps, ..ShapingOutcome::default() };
    for _ in 0..check.mdps {
        let states = rng.random_range(2..=check.max_states);
        let mdp = FiniteMdp::random(states, check.actions, &mut rng);
        let phi: Vec<f64> = (0..states).map(|_| rng.random_range(-3.0..3.0)).collect();
        let plain = solve_mdp_exact(&mdp, check.gamma, check.horizon, None, check.alpha)?;
        let shaped = solve_mdp_exact(&mdp, check.gamma, check.horizon, Some(&phi), check.alpha)?;
        for s in (0..states).filter(|&s| !mdp.terminal[s]) {
            outcome.states_compared += 1;
            if greedy_action(&plain[s], 1e-9) != greedy_action(&shaped[s], 1e-9) {
                outcome.mismatches += 1;
            }
        }
    }
    Ok(outcome)
}
