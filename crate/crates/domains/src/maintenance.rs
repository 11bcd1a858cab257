//! Machine maintenance: a worker inspects and repairs a compartment and a
//! relay while the robot watches and fetches tools.
//!
//! The robot either perceives the worker's current activity or brings one of
//! six tools. Only three tools are ever useful; the rest are distractors. A
//! fetch takes several turns during which the worker keeps acting unseen.

use std::fmt;

use agr_core::error::{Error, Result};
use agr_core::{ActionId, ActivityTriple, GenerativeModel, GoalCondition, History, Observation, StepOutcome};
use agr_core::{TargetModel, TargetStep};
use rand::Rng;

pub const PERCEIVE_COST: f64 = -0.5;
pub const MISSING_TOOL_PENALTY: f64 = -2.0;
pub const USEFUL_DELIVERY_REWARD: f64 = 5.0;
pub const USELESS_DELIVERY_PENALTY: f64 = -10.0;
pub const COMPLETION_REWARD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tool {
    Screwdriver,
    Multimeter,
    RelayPart,
    Dummy1,
    Dummy2,
    Dummy3,
}

impl Tool {
    pub const ALL: [Tool; 6] =
        [Tool::Screwdriver, Tool::Multimeter, Tool::RelayPart, Tool::Dummy1, Tool::Dummy2, Tool::Dummy3];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkerAction {
    None,
    Inspect,
    Replace,
    Screw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Board,
    Compartment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkResult {
    Ok,
    NotOk,
    NoResult,
    Fail,
}

pub type MaintenanceActivity = ActivityTriple<WorkerAction, Component, WorkResult>;

/// Bringing a tool yields no reading; perceiving yields the worker triple.
pub type MaintenanceObs = Observation<(), MaintenanceActivity>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixing {
    Sound,
    Faulty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MaintenanceState {
    /// `Faulty` means loose.
    pub compartment: Fixing,
    pub compartment_inspected: bool,
    /// `Faulty` means damaged.
    pub relay: Fixing,
    pub relay_inspected: bool,
    pub worker: MaintenanceActivity,
    pub tools_present: [bool; 6],
    /// Once raised a need stays raised, so a delivered tool scores as
    /// needed-and-present.
    pub tools_needed: [bool; 6],
}

impl MaintenanceState {
    pub fn sound(&self) -> bool {
        self.compartment == Fixing::Sound && self.relay == Fixing::Sound
    }

    pub fn missing_needed_tools(&self) -> usize {
        (0..6).filter(|&t| self.tools_needed[t] && !self.tools_present[t]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaintenanceAction {
    Perceive,
    Bring(Tool),
}

impl MaintenanceAction {
    pub const COUNT: usize = 7;

    pub fn from_id(id: ActionId) -> Result<Self> {
        match id.index() {
            0 => Ok(MaintenanceAction::Perceive),
            i if i < Self::COUNT => Ok(MaintenanceAction::Bring(Tool::ALL[i - 1])),
            i => Err(Error::IllegalAction { action: i, count: Self::COUNT }),
        }
    }

    pub fn id(self) -> ActionId {
        match self {
            MaintenanceAction::Perceive => ActionId(0),
            MaintenanceAction::Bring(tool) => ActionId(1 + tool.index()),
        }
    }
}

impl fmt::Display for MaintenanceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaintenanceAction::Perceive => f.write_str("perceive"),
            MaintenanceAction::Bring(tool) => write!(f, "bring-{}", format!("{tool:?}").to_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaintenanceConfig {
    /// Probability that a visual inspection reads correctly and that a
    /// screwing attempt succeeds.
    pub expertise: f64,
    /// Worker turns spent by one fetch.
    pub fetch_cost_steps: usize,
    pub p_initial_loose: f64,
    pub p_initial_damaged: f64,
}

impl Default for MaintenanceConfig {
    fn default() -> Self {
        Self { expertise: 0.75, fetch_cost_steps: 3, p_initial_loose: 0.5, p_initial_damaged: 0.5 }
    }
}

impl MaintenanceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("expertise", self.expertise),
            ("p_initial_loose", self.p_initial_loose),
            ("p_initial_damaged", self.p_initial_damaged),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} {p} outside [0, 1]")));
            }
        }
        if self.fetch_cost_steps == 0 {
            return Err(Error::InvalidArgument("fetch_cost_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Named expertise levels.
pub fn expertise_level(name: &str) -> Result<f64> {
    match name.trim().to_ascii_lowercase().as_str() {
        "low" => Ok(0.5),
        "medium" => Ok(0.75),
        "high" => Ok(0.9),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|p| (0.0..=1.0).contains(p))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown expertise '{other}'"))),
    }
}

#[derive(Debug, Clone)]
pub struct Maintenance {
    config: MaintenanceConfig,
}

const IDLE: MaintenanceActivity = ActivityTriple::new(WorkerAction::None, Component::Board, WorkResult::NoResult);

impl Maintenance {
    pub fn new(config: MaintenanceConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &MaintenanceConfig {
        &self.config
    }

    /// One turn of the worker policy. Writes worker variables, component
    /// status and needs; never touches which tools are present.
    pub fn worker_step<R: Rng + ?Sized>(&self, state: &MaintenanceState, rng: &mut R) -> MaintenanceState {
        let mut next = *state;
        let expertise = self.config.expertise;
        let has = |tool: Tool| state.tools_present[tool.index()];
        let w = state.worker;

        let (action, object) = match (w.action, w.object, w.result) {
            (WorkerAction::Inspect, Component::Compartment, WorkResult::NotOk) => {
                (WorkerAction::Screw, Component::Compartment)
            }
            (WorkerAction::Screw, _, WorkResult::NotOk | WorkResult::Fail) => {
                (WorkerAction::Screw, Component::Compartment)
            }
            (WorkerAction::Inspect, Component::Board, WorkResult::NotOk) => (WorkerAction::Replace, Component::Board),
            (WorkerAction::Replace, _, WorkResult::Fail) => (WorkerAction::Replace, Component::Board),
            (WorkerAction::Inspect, Component::Board, WorkResult::Fail) => (WorkerAction::Inspect, Component::Board),
            (WorkerAction::None, _, _) => {
                let object = if rng.random_bool(0.5) { Component::Board } else { Component::Compartment };
                (WorkerAction::Inspect, object)
            }
            // Finished activities hand control back to idle.
            _ => {
                next.worker = IDLE;
                return next;
            }
        };

        let result = match (action, object) {
            (WorkerAction::Inspect, Component::Compartment) => {
                let truthful = rng.random_bool(expertise);
                let reads_sound = (state.compartment == Fixing::Sound) == truthful;
                next.compartment_inspected = reads_sound;
                if reads_sound {
                    WorkResult::Ok
                } else {
                    WorkResult::NotOk
                }
            }
            (WorkerAction::Inspect, Component::Board) => {
                if !has(Tool::Multimeter) {
                    raise_need(&mut next, Tool::Multimeter)
                } else if state.relay == Fixing::Sound {
                    next.relay_inspected = true;
                    WorkResult::Ok
                } else {
                    next.relay_inspected = false;
                    WorkResult::NotOk
                }
            }
            (WorkerAction::Screw, _) => {
                if !has(Tool::Screwdriver) {
                    raise_need(&mut next, Tool::Screwdriver)
                } else if rng.random_bool(expertise) {
                    next.compartment = Fixing::Sound;
                    WorkResult::Ok
                } else {
                    WorkResult::NotOk
                }
            }
            (WorkerAction::Replace, _) => {
                if !has(Tool::RelayPart) {
                    raise_need(&mut next, Tool::RelayPart)
                } else {
                    next.relay = Fixing::Sound;
                    WorkResult::Ok
                }
            }
            (WorkerAction::None, _) => unreachable!("idle is never an attempted activity"),
        };
        next.worker = ActivityTriple::new(action, object, result);
        next
    }

    /// Advance the worker once and charge the missing-tool penalties of the
    /// resulting state; adds the completion reward when it becomes terminal.
    fn timed_turn<R: Rng + ?Sized>(&self, state: &MaintenanceState, rng: &mut R) -> (MaintenanceState, f64, bool) {
        let next = self.worker_step(state, rng);
        let terminal = self.is_terminal(&next);
        let mut reward = MISSING_TOOL_PENALTY * next.missing_needed_tools() as f64;
        if terminal {
            reward += COMPLETION_REWARD;
        }
        (next, reward, terminal)
    }

    fn tool_points(needed: bool, present: bool) -> f64 {
        match (needed, present) {
            (true, true) => 1.0,
            (true, false) | (false, true) => -1.0,
            (false, false) => 0.0,
        }
    }
}

impl GenerativeModel for Maintenance {
    type State = MaintenanceState;
    type Obs = MaintenanceObs;
    type Constraints = ();

    fn action_count(&self) -> usize {
        MaintenanceAction::COUNT
    }

    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> MaintenanceState {
        let fault = |p: f64, rng: &mut R| if rng.random_bool(p) { Fixing::Faulty } else { Fixing::Sound };
        MaintenanceState {
            compartment: fault(self.config.p_initial_loose, rng),
            compartment_inspected: false,
            relay: fault(self.config.p_initial_damaged, rng),
            relay_inspected: false,
            worker: IDLE,
            tools_present: [false; 6],
            tools_needed: [false; 6],
        }
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &MaintenanceState,
        action: ActionId,
        rng: &mut R,
    ) -> StepOutcome<MaintenanceState, MaintenanceObs> {
        let action = MaintenanceAction::from_id(action).expect("action id checked by caller");
        match action {
            MaintenanceAction::Perceive => {
                let (next, reward, terminal) = self.timed_turn(state, rng);
                StepOutcome {
                    observation: Observation::Target(next.worker),
                    next_state: next,
                    reward: PERCEIVE_COST + reward,
                    terminal,
                }
            }
            MaintenanceAction::Bring(tool) => {
                let mut current = *state;
                let mut reward = 0.0;
                for _ in 0..self.config.fetch_cost_steps {
                    let (next, turn_reward, terminal) = self.timed_turn(&current, rng);
                    reward += turn_reward;
                    current = next;
                    if terminal {
                        return StepOutcome {
                            next_state: current,
                            observation: Observation::NonTarget(()),
                            reward,
                            terminal,
                        };
                    }
                }
                let t = tool.index();
                let useful = current.tools_needed[t] && !current.tools_present[t];
                reward += if useful { USEFUL_DELIVERY_REWARD } else { USELESS_DELIVERY_PENALTY };
                current.tools_present[t] = true;
                StepOutcome { next_state: current, observation: Observation::NonTarget(()), reward, terminal: false }
            }
        }
    }

    fn is_terminal(&self, state: &MaintenanceState) -> bool {
        state.compartment_inspected && state.relay_inspected && state.sound()
    }

    fn compile_constraints(&self, _history: &History<MaintenanceObs>) {}

    fn pgs_points(&self, state: &MaintenanceState) -> f64 {
        (0..6).map(|t| Self::tool_points(state.tools_needed[t], state.tools_present[t])).sum()
    }

    fn action_name(&self, action: ActionId) -> String {
        MaintenanceAction::from_id(action).map_or_else(|_| action.to_string(), |a| a.to_string())
    }
}

fn raise_need(state: &mut MaintenanceState, tool: Tool) -> WorkResult {
    state.tools_needed[tool.index()] = true;
    WorkResult::Fail
}

fn compartment_verified(state: &MaintenanceState) -> bool {
    state.compartment_inspected && state.compartment == Fixing::Sound
}

fn relay_verified(state: &MaintenanceState) -> bool {
    state.relay_inspected && state.relay == Fixing::Sound
}

impl TargetModel for Maintenance {
    type State = MaintenanceState;
    type Activity = MaintenanceActivity;

    fn advance<R: Rng + ?Sized>(
        &self,
        state: &MaintenanceState,
        rng: &mut R,
    ) -> TargetStep<MaintenanceState, MaintenanceActivity> {
        let next = self.worker_step(state, rng);
        TargetStep { activity: next.worker, state: next, reward: 0.0 }
    }

    fn goal_conditions(&self) -> Vec<GoalCondition<MaintenanceState>> {
        vec![
            GoalCondition { name: "compartment inspected and tight", predicate: compartment_verified },
            GoalCondition { name: "relay inspected and sound", predicate: relay_verified },
        ]
    }
}
