//! Unweighted particle beliefs and the rejection/revitalization update.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pomdp::{ActionId, GenerativeModel, History};

pub const DEFAULT_PARTICLES: usize = 1000;

/// Attempts allowed per requested particle, for each of the rejection and
/// revitalization phases.
pub const ATTEMPTS_PER_PARTICLE: usize = 10;

/// Multiset of states. A state's probability is its multiplicity over the
/// particle count.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBelief<S> {
    particles: Vec<S>,
    target_count: usize,
}

impl<S: Clone + PartialEq> ParticleBelief<S> {
    pub fn new(particles: Vec<S>, target_count: usize) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::invalid("belief needs at least one particle"));
        }
        if target_count == 0 {
            return Err(Error::invalid("particle target count must be positive"));
        }
        Ok(Self { particles, target_count })
    }

    pub fn from_initial<M, R>(model: &M, count: usize, rng: &mut R) -> Result<Self>
    where
        M: GenerativeModel<State = S>,
        R: Rng + ?Sized,
    {
        let particles = (0..count).map(|_| model.initial_state(rng)).collect();
        Self::new(particles, count)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &S {
        &self.particles[rng.random_range(0..self.particles.len())]
    }

    pub fn particles(&self) -> &[S] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn frequency(&self, state: &S) -> f64 {
        let hits = self.particles.iter().filter(|p| *p == state).count();
        hits as f64 / self.particles.len() as f64
    }
}

/// Condition `belief` on the real `(action, observation)` pair.
///
/// Particles are first produced by rejection: step a uniformly drawn particle
/// and keep the successor when its simulated observation equals the real one
/// and it satisfies `constraints`. If that does not fill the population within
/// the attempt budget, the survivors (or, when none survived, unfiltered
/// successors) are varied with [`GenerativeModel::transform_particle`].
/// Whatever was found is then resampled up to exactly `target_count`.
pub fn update_belief<M, R>(
    belief: &ParticleBelief<M::State>,
    action: ActionId,
    observation: &M::Obs,
    model: &M,
    constraints: &M::Constraints,
    rng: &mut R,
) -> Result<ParticleBelief<M::State>>
where
    M: GenerativeModel,
    R: Rng + ?Sized,
{
    if belief.is_empty() {
        return Err(Error::invalid("cannot update an empty belief"));
    }
    let target = belief.target_count();
    let budget = ATTEMPTS_PER_PARTICLE * target;
    let mut kept = Vec::with_capacity(target);
    let mut fallback = Vec::new();

    for _ in 0..budget {
        if kept.len() == target {
            break;
        }
        let outcome = model.step(belief.sample(rng), action, rng);
        if outcome.terminal {
            continue;
        }
        if outcome.observation == *observation && model.is_consistent(&outcome.next_state, constraints) {
            kept.push(outcome.next_state);
        } else if kept.is_empty() && fallback.len() < target {
            fallback.push(outcome.next_state);
        }
    }

    if kept.len() < target {
        let bases = if kept.is_empty() { fallback } else { kept.clone() };
        if !bases.is_empty() {
            for _ in 0..budget {
                if kept.len() == target {
                    break;
                }
                let base = &bases[rng.random_range(0..bases.len())];
                if let Some(varied) = model.transform_particle(base, rng, constraints) {
                    kept.push(varied);
                }
            }
        }
    }

    if kept.is_empty() {
        return Err(Error::ParticleDeprivation { attempts: 2 * budget });
    }
    fill_to_target(&mut kept, target, rng);
    ParticleBelief::new(kept, target)
}

/// Rebuild a belief from scratch: draw initial states and replay the whole
/// history, keeping only replays whose simulated observations all match and
/// whose final state satisfies `constraints`.
pub fn reset_belief<M, R>(
    model: &M,
    history: &History<M::Obs>,
    constraints: &M::Constraints,
    target_count: usize,
    rng: &mut R,
) -> Result<ParticleBelief<M::State>>
where
    M: GenerativeModel,
    R: Rng + ?Sized,
{
    let budget = ATTEMPTS_PER_PARTICLE * target_count;
    let mut kept = Vec::with_capacity(target_count);
    'attempt: for _ in 0..budget {
        if kept.len() == target_count {
            break;
        }
        let mut state = model.initial_state(rng);
        for (action, observation) in history.iter() {
            let outcome = model.step(&state, *action, rng);
            if outcome.terminal || outcome.observation != *observation {
                continue 'attempt;
            }
            state = outcome.next_state;
        }
        if model.is_consistent(&state, constraints) {
            kept.push(state);
        }
    }
    if kept.is_empty() {
        return Err(Error::ParticleDeprivation { attempts: budget });
    }
    fill_to_target(&mut kept, target_count, rng);
    ParticleBelief::new(kept, target_count)
}

fn fill_to_target<S: Clone, R: Rng + ?Sized>(particles: &mut Vec<S>, target: usize, rng: &mut R) {
    let found = particles.len();
    while particles.len() < target {
        let pick = particles[rng.random_range(0..found)].clone();
        particles.push(pick);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomdp::StepOutcome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two hidden states that stay put; the only action reveals which one
    /// holds. Optionally the reading is flipped with probability `noise`.
    struct Revealer {
        noise: f64,
    }

    impl GenerativeModel for Revealer {
        type State = u8;
        type Obs = u8;
        type Constraints = ();

        fn action_count(&self) -> usize {
            1
        }

        fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
            rng.random_range(0..2)
        }

        fn step<R: Rng + ?Sized>(&self, state: &u8, _a: ActionId, rng: &mut R) -> StepOutcome<u8, u8> {
            let flip = self.noise > 0.0 && rng.random_bool(self.noise);
            StepOutcome {
                next_state: *state,
                observation: if flip { 1 - *state } else { *state },
                reward: 0.0,
                terminal: false,
            }
        }

        fn is_terminal(&self, _state: &u8) -> bool {
            false
        }

        fn compile_constraints(&self, _history: &History<u8>) {}
    }

    /// Deterministic counter: every step increments the state and emits 0.
    struct Counter;

    impl GenerativeModel for Counter {
        type State = u32;
        type Obs = u8;
        type Constraints = ();

        fn action_count(&self) -> usize {
            1
        }

        fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
            rng.random_range(0..5)
        }

        fn step<R: Rng + ?Sized>(&self, state: &u32, _a: ActionId, _rng: &mut R) -> StepOutcome<u32, u8> {
            StepOutcome { next_state: state + 1, observation: 0, reward: 0.0, terminal: false }
        }

        fn is_terminal(&self, _state: &u32) -> bool {
            false
        }

        fn compile_constraints(&self, _history: &History<u8>) {}
    }

    #[test]
    fn no_rejection_steps_every_particle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let belief = ParticleBelief::new(vec![0u32, 1, 2, 3], 4).unwrap();
        let next = update_belief(&belief, ActionId(0), &0, &Counter, &(), &mut rng).unwrap();
        assert_eq!(next.len(), 4);
        assert!(next.particles().iter().all(|p| (1..=4).contains(p)));
    }

    #[test]
    fn rejection_keeps_only_matching_descendants() {
        // Enumerate both states: state 1 is the only one that can emit 1.
        let model = Revealer { noise: 0.0 };
        for s in 0u8..2 {
            let out = model.step(&s, ActionId(0), &mut ChaCha8Rng::seed_from_u64(0));
            assert_eq!(out.observation == 1, s == 1);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let belief = ParticleBelief::new(vec![0, 1, 0, 1, 1, 0], 50).unwrap();
        let next = update_belief(&belief, ActionId(0), &1, &model, &(), &mut rng).unwrap();
        assert_eq!(next.len(), 50);
        assert!(next.particles().iter().all(|&p| p == 1));
        assert_eq!(next.frequency(&1), 1.0);
    }

    #[test]
    fn impossible_observation_signals_deprivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let belief = ParticleBelief::new(vec![0u8; 10], 10).unwrap();
        let err = update_belief(&belief, ActionId(0), &1, &Revealer { noise: 0.0 }, &(), &mut rng).unwrap_err();
        assert_eq!(err, Error::ParticleDeprivation { attempts: 200 });
    }

    #[test]
    fn reset_replays_history() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let history = History::new().appended(ActionId(0), 1u8).appended(ActionId(0), 1);
        let belief = reset_belief(&Revealer { noise: 0.1 }, &history, &(), 200, &mut rng).unwrap();
        assert_eq!(belief.len(), 200);
        // Posterior after two agreeing 90% readings: 0.81 / (0.81 + 0.01).
        let f = belief.frequency(&1);
        assert!(f > 0.9, "posterior mass on 1 was {f}");
    }

    #[test]
    fn empty_belief_is_rejected() {
        assert!(ParticleBelief::<u8>::new(vec![], 10).is_err());
        assert!(ParticleBelief::new(vec![1u8], 0).is_err());
    }

    #[test]
    fn update_is_deterministic_for_a_seed() {
        let model = Revealer { noise: 0.3 };
        let belief = ParticleBelief::new(vec![0, 1, 1, 0, 1], 100).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            update_belief(&belief, ActionId(0), &1, &model, &(), &mut rng).unwrap()
        };
        assert_eq!(run(5), run(5));
    }
}
