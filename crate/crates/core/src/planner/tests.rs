use super::*;
use crate::pomdp::{History, StepOutcome};
use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One decision, then terminal. Action `i` pays `rewards[i]`.
struct Bandit {
    rewards: Vec<f64>,
}

impl GenerativeModel for Bandit {
    type State = u8;
    type Obs = ();
    type Constraints = ();

    fn action_count(&self) -> usize {
        self.rewards.len()
    }

    fn initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> u8 {
        0
    }

    fn step<R: Rng + ?Sized>(&self, _s: &u8, a: ActionId, _rng: &mut R) -> StepOutcome<u8, ()> {
        StepOutcome { next_state: 1, observation: (), reward: self.rewards[a.index()], terminal: true }
    }

    fn is_terminal(&self, s: &u8) -> bool {
        *s == 1
    }

    fn compile_constraints(&self, _h: &History<()>) {}
}

/// Single action, reward 1 per step, terminal after `len` steps. Points
/// equal the step counter.
struct Chain {
    len: u8,
}

impl GenerativeModel for Chain {
    type State = u8;
    type Obs = ();
    type Constraints = ();

    fn action_count(&self) -> usize {
        1
    }

    fn initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> u8 {
        0
    }

    fn step<R: Rng + ?Sized>(&self, s: &u8, _a: ActionId, _rng: &mut R) -> StepOutcome<u8, ()> {
        StepOutcome { next_state: s + 1, observation: (), reward: 1.0, terminal: s + 1 >= self.len }
    }

    fn is_terminal(&self, s: &u8) -> bool {
        *s >= self.len
    }

    fn pgs_points(&self, s: &u8) -> f64 {
        *s as f64
    }

    fn compile_constraints(&self, _h: &History<()>) {}
}

/// Points depend only on the chosen action: action 2 leads to the best
/// points, the others tie.
struct PointsByAction;

impl GenerativeModel for PointsByAction {
    type State = u8;
    type Obs = ();
    type Constraints = ();

    fn action_count(&self) -> usize {
        4
    }

    fn initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> u8 {
        0
    }

    fn step<R: Rng + ?Sized>(&self, _s: &u8, a: ActionId, _rng: &mut R) -> StepOutcome<u8, ()> {
        StepOutcome { next_state: a.index() as u8 + 10, observation: (), reward: 0.0, terminal: false }
    }

    fn is_terminal(&self, _s: &u8) -> bool {
        false
    }

    fn pgs_points(&self, s: &u8) -> f64 {
        if *s == 12 {
            3.0
        } else {
            0.0
        }
    }

    fn compile_constraints(&self, _h: &History<()>) {}
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn config(sims: usize) -> PlannerConfig {
    PlannerConfig { num_simulations: sims, ..PlannerConfig::default() }
}

#[test]
fn shaping_bonus_examples() {
    assert!((shaping_bonus(2.0, 3.0, 0.95, 10.0) - 8.5).abs() < 1e-12);
    assert_eq!(shaping_bonus(0.0, 0.0, 0.95, 10.0), 0.0);
    let (p, a, g) = (1.7, 3.0, 0.9);
    assert!((shaping_bonus(p, p, g, a) - a * p * (g - 1.0)).abs() < 1e-12);
}

#[test]
fn ucb_prefers_untried_action() {
    let node: SearchNode<(), ()> = SearchNode::with_records(vec![
        ActionRecord { visits: 5, value: 100.0 },
        ActionRecord { visits: 0, value: 0.0 },
        ActionRecord { visits: 3, value: 50.0 },
    ]);
    for seed in 0..20 {
        assert_eq!(ucb1_select(&node, 5.0, &mut rng(seed)), ActionId(1));
    }
}

#[test]
fn ucb_untried_actions_are_uniform() {
    let node: SearchNode<(), ()> = SearchNode::with_records(vec![
        ActionRecord { visits: 0, value: 0.0 },
        ActionRecord { visits: 4, value: 9.0 },
        ActionRecord { visits: 0, value: 0.0 },
    ]);
    let mut r = rng(3);
    let mut counts = [0usize; 3];
    for _ in 0..4000 {
        counts[ucb1_select(&node, 1.0, &mut r).index()] += 1;
    }
    assert_eq!(counts[1], 0);
    assert!((counts[0] as f64 / 4000.0 - 0.5).abs() < 0.05, "{counts:?}");
}

#[test]
fn ucb_greedy_without_exploration() {
    let node: SearchNode<(), ()> =
        SearchNode::with_records(vec![ActionRecord { visits: 4, value: 3.0 }, ActionRecord { visits: 4, value: 5.0 }]);
    assert_eq!(ucb1_select(&node, 0.0, &mut rng(0)), ActionId(1));
}

#[test]
fn ucb_exploration_bonus_arithmetic() {
    // N = 10, both Q = 1: bonus sqrt(ln 10 / 1) = 1.517 beats sqrt(ln 10 / 9) = 0.506.
    let bonus_rare = (10f64.ln() / 1.0).sqrt();
    let bonus_common = (10f64.ln() / 9.0).sqrt();
    assert!((bonus_rare - 1.517).abs() < 1e-3);
    assert!((bonus_common - 0.506).abs() < 1e-3);
    let node: SearchNode<(), ()> =
        SearchNode::with_records(vec![ActionRecord { visits: 9, value: 1.0 }, ActionRecord { visits: 1, value: 1.0 }]);
    assert_eq!(node.visits(), 10);
    assert_eq!(ucb1_select(&node, 1.0, &mut rng(0)), ActionId(1));
}

#[test]
fn single_action_domain_plans_that_action() {
    let model = Chain { len: 3 };
    let belief = ParticleBelief::new(vec![0], 1).unwrap();
    assert_eq!(plan(&belief, &model, &config(10), &mut rng(1)).unwrap(), ActionId(0));
}

#[test]
fn bandit_always_picks_the_paying_arm() {
    let model = Bandit { rewards: vec![0.0, 1.0] };
    let belief = ParticleBelief::new(vec![0], 1).unwrap();
    let mut r = rng(17);
    for _ in 0..100 {
        assert_eq!(plan(&belief, &model, &config(10_000), &mut r).unwrap(), ActionId(1));
    }
}

#[test]
fn invalid_config_is_rejected() {
    let model = Bandit { rewards: vec![0.0] };
    assert!(Planner::new(&model, PlannerConfig { num_simulations: 0, ..config(1) }).is_err());
    assert!(Planner::new(&model, PlannerConfig { max_depth: 0, ..config(1) }).is_err());
    assert!(Planner::new(&model, PlannerConfig { ucb_c: -1.0, ..config(1) }).is_err());
}

#[test]
fn simulate_horizon_cutoff_returns_zero() {
    let model = Bandit { rewards: vec![7.0] };
    let cfg = PlannerConfig { max_depth: 3, ..config(1) };
    let mut planner = Planner::new(&model, cfg).unwrap();
    let root = planner.tree().root();
    assert_eq!(planner.simulate(&model, &0, root, 3, &mut rng(0)), 0.0);
    assert_eq!(planner.root().visits(), 0);
}

#[test]
fn simulate_terminal_returns_immediate_reward() {
    let model = Bandit { rewards: vec![7.0] };
    let mut planner = Planner::new(&model, config(1)).unwrap();
    let root = planner.tree().root();
    assert_eq!(planner.simulate(&model, &0, root, 0, &mut rng(0)), 7.0);
    assert_eq!(planner.root().record(0), ActionRecord { visits: 1, value: 7.0 });
    // Terminal outcomes never create children.
    assert_eq!(planner.tree().len(), 1);
}

#[test]
fn rollout_examples() {
    let cfg = PlannerConfig { gamma: 0.5, ..config(1) };
    assert_eq!(rollout(&Chain { len: 2 }, &2, 0, &cfg, &mut rng(0)), 0.0);
    assert!((rollout(&Chain { len: 2 }, &0, 0, &cfg, &mut rng(0)) - 1.5).abs() < 1e-12);
    // Depth budget truncates: only one step left.
    let short = PlannerConfig { max_depth: 1, ..cfg.clone() };
    assert!((rollout(&Chain { len: 5 }, &0, 0, &short, &mut rng(0)) - 1.0).abs() < 1e-12);
    // PGS rollouts still report raw rewards.
    let pgs = PlannerConfig { mode: PlannerMode::Pgs, alpha: 100.0, ..cfg };
    assert!((rollout(&Chain { len: 2 }, &0, 0, &pgs, &mut rng(0)) - 1.5).abs() < 1e-12);
}

#[test]
fn pgs_rollout_action_picks_unique_best() {
    let mut r = rng(2);
    for _ in 0..50 {
        assert_eq!(pgs_rollout_action(&PointsByAction, &0, &mut r), ActionId(2));
    }
}

#[test]
fn pgs_rollout_action_full_tie_is_uniform() {
    let model = Bandit { rewards: vec![0.0; 4] };
    let mut r = rng(9);
    let mut counts = [0usize; 4];
    for _ in 0..8000 {
        counts[pgs_rollout_action(&model, &0, &mut r).index()] += 1;
    }
    for c in counts {
        assert!((c as f64 / 8000.0 - 0.25).abs() < 0.03, "{counts:?}");
    }
}

#[test]
fn pgs_mode_shapes_tree_rewards() {
    // Chain of one step: points 0 -> 1, reward 1, terminal.
    let model = Chain { len: 1 };
    let cfg = PlannerConfig { mode: PlannerMode::Pgs, alpha: 10.0, gamma: 0.95, ..config(1) };
    let mut planner = Planner::new(&model, cfg).unwrap();
    let root = planner.tree().root();
    let ret = planner.simulate(&model, &0, root, 0, &mut rng(0));
    assert!((ret - (1.0 + 9.5)).abs() < 1e-12);
}

#[test]
fn advance_reuses_observed_subtree() {
    let model = Chain { len: 10 };
    let mut planner = Planner::new(&model, config(50)).unwrap();
    let belief = ParticleBelief::new(vec![0], 1).unwrap();
    planner.plan(&model, &belief, &mut rng(4)).unwrap();
    let child = planner.root().child(0, &()).unwrap();
    let child_visits = planner.tree().node(child).visits();
    let child_particles = planner.tree().node(child).particles().to_vec();
    assert!(planner.advance(ActionId(0), &()));
    assert_eq!(planner.root().visits(), child_visits);
    assert!(child_particles.iter().all(|&s| s == 1));
    assert_eq!(planner.root().particles(), child_particles.as_slice());
}

#[test]
fn planner_mode_parses() {
    assert_eq!("pomcp".parse::<PlannerMode>().unwrap(), PlannerMode::Pomcp);
    assert_eq!("PGS".parse::<PlannerMode>().unwrap(), PlannerMode::Pgs);
    assert!("greedy".parse::<PlannerMode>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn root_visits_equal_simulation_count(sims in 1usize..400, seed in any::<u64>(), arms in 1usize..6) {
        let model = Bandit { rewards: (0..arms).map(|i| i as f64 * 0.3).collect() };
        let belief = ParticleBelief::new(vec![0], 1).unwrap();
        let mut planner = Planner::new(&model, config(sims)).unwrap();
        planner.plan(&model, &belief, &mut rng(seed)).unwrap();
        let root = planner.root();
        prop_assert_eq!(root.visits(), sims as u64);
        prop_assert_eq!(root.records().iter().map(|r| r.visits).sum::<u64>(), sims as u64);
    }

    #[test]
    fn every_node_visit_count_is_sum_of_action_visits(sims in 1usize..300, seed in any::<u64>()) {
        let model = Chain { len: 6 };
        let belief = ParticleBelief::new(vec![0, 1, 2], 3).unwrap();
        let mut planner = Planner::new(&model, config(sims)).unwrap();
        planner.plan(&model, &belief, &mut rng(seed)).unwrap();
        let tree = planner.tree();
        let mut stack = vec![tree.root()];
        while let Some(id) = stack.pop() {
            let node = tree.node(id);
            prop_assert_eq!(node.visits(), node.records().iter().map(|r| r.visits).sum::<u64>());
            for a in 0..node.action_count() {
                stack.extend(node.children(a).map(|(_, c)| *c));
            }
        }
    }
}
