//! One plan-act-observe episode against a hidden true state.

use std::time::{Duration, Instant};

use agr_core::{
    discounted_return, reset_belief, update_belief, ActionId, Error, GenerativeModel, History, ParticleBelief, Planner,
    PlannerConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Stream ids carved out of one episode seed. The world stream drives the
/// hidden state; the agent stream drives belief sampling and search, so
/// switching planners never changes the hidden world a seed produces.
const WORLD_STREAM: u64 = 0;
const AGENT_STREAM: u64 = 1;

pub fn episode_rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut world = ChaCha8Rng::seed_from_u64(seed);
    world.set_stream(WORLD_STREAM);
    let mut agent = ChaCha8Rng::seed_from_u64(seed);
    agent.set_stream(AGENT_STREAM);
    (world, agent)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSettings {
    pub planner: PlannerConfig,
    pub max_steps: usize,
    pub particles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub steps: usize,
    /// Discounted sum of executed, unshaped rewards.
    pub discounted_return: f64,
    pub reached_terminal: bool,
    /// The belief could not be rebuilt after particle deprivation.
    pub failed: bool,
    pub duration: Duration,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f64>,
}

impl EpisodeRecord {
    /// Everything except wall-clock time, for determinism checks.
    pub fn same_run(&self, other: &EpisodeRecord) -> bool {
        self.seed == other.seed
            && self.steps == other.steps
            && self.discounted_return.to_bits() == other.discounted_return.to_bits()
            && self.reached_terminal == other.reached_terminal
            && self.failed == other.failed
            && self.actions == other.actions
            && self.rewards.iter().map(|r| r.to_bits()).eq(other.rewards.iter().map(|r| r.to_bits()))
    }
}

pub fn run_episode<M: GenerativeModel>(model: &M, settings: &EpisodeSettings, seed: u64) -> Result<EpisodeRecord> {
    let started = Instant::now();
    let (mut world, mut agent) = episode_rngs(seed);
    let gamma = settings.planner.gamma;
    let mut planner = Planner::new(model, settings.planner.clone())?;
    let mut state = model.initial_state(&mut world);
    let mut belief = ParticleBelief::from_initial(model, settings.particles, &mut agent)?;
    let mut history = History::new();
    let mut actions = Vec::new();
    let mut rewards = Vec::new();
    let mut reached_terminal = false;
    let mut failed = false;

    for _ in 0..settings.max_steps {
        let action = planner.plan(model, &belief, &mut agent)?;
        let outcome = model.checked_step(&state, action, &mut world)?;
        actions.push(action);
        rewards.push(outcome.reward);
        history.push(action, outcome.observation.clone());
        state = outcome.next_state;
        if outcome.terminal {
            reached_terminal = true;
            break;
        }
        let constraints = model.compile_constraints(&history);
        belief = match update_belief(&belief, action, &outcome.observation, model, &constraints, &mut agent) {
            Ok(next) => next,
            Err(Error::ParticleDeprivation { .. }) => {
                match reset_belief(model, &history, &constraints, settings.particles, &mut agent) {
                    Ok(rebuilt) => rebuilt,
                    Err(Error::ParticleDeprivation { .. }) => {
                        failed = true;
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Err(e) => return Err(e.into()),
        };
        planner.advance(action, &outcome.observation);
    }

    Ok(EpisodeRecord {
        seed,
        steps: actions.len(),
        discounted_return: discounted_return(&rewards, gamma)?,
        reached_terminal,
        failed,
        duration: started.elapsed(),
        actions,
        rewards,
    })
}
