//! Truck assembly: a worker builds two toy trucks from parts taken out of six
//! containers and glues each one; the robot inspects, restocks and supplies
//! glue.
//!
//! Each robot action is followed by exactly one worker turn. Readings of the
//! truck type and of container emptiness are correct with the configured
//! sensor accuracy and flipped otherwise.

use std::fmt;

use agr_core::error::{Error, Result};
use agr_core::{ActionId, ActivityTriple, GenerativeModel, GoalCondition, History, Observation, StepOutcome};
use agr_core::{TargetModel, TargetStep};
use rand::Rng;

pub const SENSE_COST: f64 = -0.5;
pub const SUPPLY_COST: f64 = -2.0;
pub const OVERFLOW_PENALTY: f64 = -5.0;
pub const MISSING_PENALTY: f64 = -5.0;
pub const WAIT_PENALTY: f64 = -2.0;
pub const TRUCK_REWARD: f64 = 5.0;

pub const CONTAINERS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartKind {
    Chassis,
    Wheels,
    BlueCabin,
    YellowCabin,
    RedCabin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Truck {
    Red,
    Blue,
}

impl Truck {
    pub const ALL: [Truck; 2] = [Truck::Red, Truck::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Truck {
        match self {
            Truck::Red => Truck::Blue,
            Truck::Blue => Truck::Red,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Glue {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkerAction {
    None,
    Assemble,
    Wait,
}

/// What the worker handles. Gluing is reported on `Container`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkObject {
    Chassis,
    Wheels,
    BlueCabin,
    YellowCabin,
    RedCabin,
    Container,
}

impl From<PartKind> for WorkObject {
    fn from(part: PartKind) -> Self {
        match part {
            PartKind::Chassis => WorkObject::Chassis,
            PartKind::Wheels => WorkObject::Wheels,
            PartKind::BlueCabin => WorkObject::BlueCabin,
            PartKind::YellowCabin => WorkObject::YellowCabin,
            PartKind::RedCabin => WorkObject::RedCabin,
        }
    }
}

impl WorkObject {
    pub const ALL: [WorkObject; 6] = [
        WorkObject::Chassis,
        WorkObject::Wheels,
        WorkObject::BlueCabin,
        WorkObject::YellowCabin,
        WorkObject::RedCabin,
        WorkObject::Container,
    ];

    fn part(self) -> Option<PartKind> {
        match self {
            WorkObject::Chassis => Some(PartKind::Chassis),
            WorkObject::Wheels => Some(PartKind::Wheels),
            WorkObject::BlueCabin => Some(PartKind::BlueCabin),
            WorkObject::YellowCabin => Some(PartKind::YellowCabin),
            WorkObject::RedCabin => Some(PartKind::RedCabin),
            WorkObject::Container => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkResult {
    Ok,
    Fail,
}

pub type AssemblyActivity = ActivityTriple<WorkerAction, WorkObject, WorkResult>;

/// Robot-side readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reading {
    Nothing,
    Truck(Truck),
    Container { index: usize, empty: bool },
}

pub type AssemblyObs = Observation<Reading, AssemblyActivity>;

const IDLE: AssemblyActivity = ActivityTriple::new(WorkerAction::None, WorkObject::Container, WorkResult::Ok);

/// Every triple the worker can be in.
pub fn legal_activities() -> Vec<AssemblyActivity> {
    let mut out = vec![IDLE];
    for object in WorkObject::ALL {
        out.push(ActivityTriple::new(WorkerAction::Assemble, object, WorkResult::Ok));
        out.push(ActivityTriple::new(WorkerAction::Assemble, object, WorkResult::Fail));
        out.push(ActivityTriple::new(WorkerAction::Wait, object, WorkResult::Ok));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssemblyState {
    pub quantity: [u8; CONTAINERS],
    pub needed: [bool; CONTAINERS],
    /// `None` once both trucks are glued.
    pub current_truck: Option<Truck>,
    /// Bit `i` set when recipe slot `i` of the current truck is in place.
    pub assembled: u16,
    pub glue: Option<Glue>,
    pub worker: AssemblyActivity,
    pub completed: [bool; 2],
}

impl AssemblyState {
    pub fn trucks_completed(&self) -> usize {
        self.completed.iter().filter(|&&c| c).count()
    }

    pub fn empty_and_needed(&self) -> usize {
        (0..CONTAINERS).filter(|&i| self.quantity[i] == 0 && self.needed[i]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssemblyAction {
    PerceiveWorker,
    InspectTruck,
    InspectContainer(usize),
    Restock(usize),
    BringGlue(Glue),
}

impl AssemblyAction {
    pub const COUNT: usize = 2 + 2 * CONTAINERS + 2;

    pub fn from_id(id: ActionId) -> Result<Self> {
        let i = id.index();
        Ok(match i {
            0 => AssemblyAction::PerceiveWorker,
            1 => AssemblyAction::InspectTruck,
            2..=7 => AssemblyAction::InspectContainer(i - 2),
            8..=13 => AssemblyAction::Restock(i - 8),
            14 => AssemblyAction::BringGlue(Glue::A),
            15 => AssemblyAction::BringGlue(Glue::B),
            _ => return Err(Error::IllegalAction { action: i, count: Self::COUNT }),
        })
    }

    pub fn id(self) -> ActionId {
        ActionId(match self {
            AssemblyAction::PerceiveWorker => 0,
            AssemblyAction::InspectTruck => 1,
            AssemblyAction::InspectContainer(c) => 2 + c,
            AssemblyAction::Restock(c) => 8 + c,
            AssemblyAction::BringGlue(Glue::A) => 14,
            AssemblyAction::BringGlue(Glue::B) => 15,
        })
    }
}

impl fmt::Display for AssemblyAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssemblyAction::PerceiveWorker => f.write_str("perceive-worker"),
            AssemblyAction::InspectTruck => f.write_str("inspect-truck"),
            AssemblyAction::InspectContainer(c) => write!(f, "inspect-container-{c}"),
            AssemblyAction::Restock(c) => write!(f, "restock-{c}"),
            AssemblyAction::BringGlue(g) => write!(f, "bring-glue-{g:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyConfig {
    pub sensor_accuracy: f64,
    pub capacity: u8,
    pub layout: [PartKind; CONTAINERS],
    /// Parts per truck, indexed by [`Truck::index`], assembled in order.
    pub recipes: [Vec<(PartKind, u8)>; 2],
    pub glue: [Glue; 2],
    pub initial_quantities: [u8; CONTAINERS],
    /// Truck built first; the other follows.
    pub first_truck: Truck,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            sensor_accuracy: 0.9,
            capacity: 15,
            layout: [
                PartKind::Chassis,
                PartKind::Wheels,
                PartKind::Wheels,
                PartKind::BlueCabin,
                PartKind::YellowCabin,
                PartKind::RedCabin,
            ],
            recipes: [
                vec![(PartKind::Chassis, 1), (PartKind::Wheels, 2), (PartKind::RedCabin, 1)],
                vec![(PartKind::Chassis, 1), (PartKind::Wheels, 2), (PartKind::BlueCabin, 1)],
            ],
            glue: [Glue::A, Glue::B],
            initial_quantities: [1; CONTAINERS],
            first_truck: Truck::Red,
        }
    }
}

impl AssemblyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sensor_accuracy > 0.0 && self.sensor_accuracy <= 1.0) {
            return Err(Error::InvalidArgument(format!("sensor accuracy {} outside (0, 1]", self.sensor_accuracy)));
        }
        if self.capacity == 0 {
            return Err(Error::InvalidArgument("capacity must be positive".into()));
        }
        if let Some(q) = self.initial_quantities.iter().find(|&&q| q > self.capacity) {
            return Err(Error::InvalidArgument(format!("initial quantity {q} exceeds capacity {}", self.capacity)));
        }
        for recipe in &self.recipes {
            if recipe.iter().any(|(part, _)| !self.layout.contains(part)) {
                return Err(Error::InvalidArgument("recipe uses a part no container holds".into()));
            }
            let slots: usize = recipe.iter().map(|&(_, n)| usize::from(n)).sum();
            if slots == 0 || slots > 16 {
                return Err(Error::InvalidArgument(format!("recipe needs 1 to 16 parts, got {slots}")));
            }
        }
        Ok(())
    }
}

/// Knowledge compiled from real observations; particles must agree with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyConstraints {
    /// Inclusive `(low, high)` bounds on every container quantity.
    pub quantity_bounds: [(u8, u8); CONTAINERS],
    pub truck: Option<Truck>,
    /// Worker triple reported by a perception on the latest step.
    pub worker: Option<AssemblyActivity>,
}

impl AssemblyConstraints {
    pub fn unconstrained(capacity: u8) -> Self {
        Self { quantity_bounds: [(0, capacity); CONTAINERS], truck: None, worker: None }
    }
}

#[derive(Debug, Clone)]
pub struct Assembly {
    config: AssemblyConfig,
    slots: [Vec<PartKind>; 2],
    /// Containers whose part appears in some recipe.
    consumable: [bool; CONTAINERS],
}

impl Assembly {
    pub fn new(config: AssemblyConfig) -> Result<Self> {
        config.validate()?;
        let expand = |recipe: &[(PartKind, u8)]| {
            recipe.iter().flat_map(|&(part, n)| std::iter::repeat_n(part, n.into())).collect::<Vec<_>>()
        };
        let slots = [expand(&config.recipes[0]), expand(&config.recipes[1])];
        let consumable = std::array::from_fn(|i| slots.iter().flatten().any(|&p| p == config.layout[i]));
        Ok(Self { config, slots, consumable })
    }

    pub fn config(&self) -> &AssemblyConfig {
        &self.config
    }

    pub fn slots(&self, truck: Truck) -> &[PartKind] {
        &self.slots[truck.index()]
    }

    fn next_truck(&self, completed: &[bool; 2]) -> Option<Truck> {
        let first = self.config.first_truck;
        [first, first.other()].into_iter().find(|t| !completed[t.index()])
    }

    /// The only truck whose recipe uses `part`, if exactly one does.
    fn truck_using(&self, part: PartKind) -> Option<Truck> {
        let users: Vec<Truck> = Truck::ALL.into_iter().filter(|t| self.slots[t.index()].contains(&part)).collect();
        match users[..] {
            [truck] => Some(truck),
            _ => None,
        }
    }

    /// One worker turn. Writes worker variables, truck progress, glue use,
    /// part stock and needs.
    pub fn worker_step(&self, state: &AssemblyState) -> (AssemblyState, f64) {
        let mut next = *state;
        let w = state.worker;
        if w.action == WorkerAction::Assemble && w.result == WorkResult::Fail {
            next.worker = ActivityTriple::new(WorkerAction::Wait, w.object, WorkResult::Ok);
            return (next, WAIT_PENALTY);
        }
        let Some(truck) = state.current_truck else {
            return (next, 0.0);
        };
        let slots = self.slots(truck);
        if let Some(slot) = (0..slots.len()).find(|&i| state.assembled & (1 << i) == 0) {
            let part = slots[slot];
            let object = WorkObject::from(part);
            let source = (0..CONTAINERS).find(|&c| self.config.layout[c] == part && state.quantity[c] > 0);
            return match source {
                Some(c) => {
                    next.quantity[c] -= 1;
                    next.assembled |= 1 << slot;
                    next.worker = ActivityTriple::new(WorkerAction::Assemble, object, WorkResult::Ok);
                    (next, 0.0)
                }
                None => {
                    for c in (0..CONTAINERS).filter(|&c| self.config.layout[c] == part) {
                        next.needed[c] = true;
                    }
                    next.worker = ActivityTriple::new(WorkerAction::Assemble, object, WorkResult::Fail);
                    (next, MISSING_PENALTY)
                }
            };
        }
        if state.glue == Some(self.config.glue[truck.index()]) {
            next.glue = None;
            next.completed[truck.index()] = true;
            next.assembled = 0;
            next.current_truck = self.next_truck(&next.completed);
            next.worker = ActivityTriple::new(WorkerAction::Assemble, WorkObject::Container, WorkResult::Ok);
            (next, TRUCK_REWARD)
        } else {
            next.worker = ActivityTriple::new(WorkerAction::Assemble, WorkObject::Container, WorkResult::Fail);
            (next, MISSING_PENALTY)
        }
    }

    fn noisy<R: Rng + ?Sized>(&self, truth: bool, rng: &mut R) -> bool {
        if rng.random_bool(self.config.sensor_accuracy) {
            truth
        } else {
            !truth
        }
    }

    /// Size of the flat state space, by multiplying variable ranges.
    pub fn state_space_size(&self) -> u128 {
        let levels = u128::from(self.config.capacity) + 1;
        let max_slots = self.slots.iter().map(Vec::len).max().unwrap_or(0) as u32;
        levels.pow(CONTAINERS as u32)
            * 2u128.pow(CONTAINERS as u32) // needed flags
            * 3 // current truck or done
            * 2u128.pow(max_slots) // assembled slots
            * 3 // staged glue
            * (3 * 6 * 2) // worker triples
            * 4 // completed trucks
    }

    /// Number of distinct observation values.
    pub fn observation_count(&self) -> usize {
        let triples = 3 * WorkObject::ALL.len() * 2;
        let readings = 1 + Truck::ALL.len() + 2 * CONTAINERS;
        triples + readings
    }

    fn apply_transform<R: Rng + ?Sized>(&self, base: &AssemblyState, rng: &mut R) -> Option<AssemblyState> {
        let mut s = *base;
        match rng.random_range(0..3) {
            0 => {
                let c = rng.random_range(0..CONTAINERS);
                s.quantity[c] = rng.random_range(0..=self.config.capacity);
            }
            1 => {
                let legal = legal_activities();
                s.worker = legal[rng.random_range(0..legal.len())];
            }
            _ => s.current_truck = Some(s.current_truck?.other()),
        }
        Some(s)
    }
}

impl GenerativeModel for Assembly {
    type State = AssemblyState;
    type Obs = AssemblyObs;
    type Constraints = AssemblyConstraints;

    fn action_count(&self) -> usize {
        AssemblyAction::COUNT
    }

    fn initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> AssemblyState {
        AssemblyState {
            quantity: self.config.initial_quantities,
            needed: [false; CONTAINERS],
            current_truck: Some(self.config.first_truck),
            assembled: 0,
            glue: None,
            worker: IDLE,
            completed: [false; 2],
        }
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &AssemblyState,
        action: ActionId,
        rng: &mut R,
    ) -> StepOutcome<AssemblyState, AssemblyObs> {
        let action = AssemblyAction::from_id(action).expect("action id checked by caller");
        let mut s = *state;
        let mut reward = match action {
            AssemblyAction::Restock(c) => {
                let overflow = if s.quantity[c] == self.config.capacity { OVERFLOW_PENALTY } else { 0.0 };
                s.quantity[c] = self.config.capacity;
                s.needed[c] = false;
                SUPPLY_COST + overflow
            }
            AssemblyAction::BringGlue(g) => {
                s.glue = Some(g);
                SUPPLY_COST
            }
            _ => SENSE_COST,
        };
        let (next, worker_reward) = self.worker_step(&s);
        reward += worker_reward;
        let observation = match action {
            AssemblyAction::PerceiveWorker => Observation::Target(next.worker),
            AssemblyAction::InspectTruck => match next.current_truck {
                Some(t) => Observation::NonTarget(Reading::Truck(if self.noisy(true, rng) { t } else { t.other() })),
                None => Observation::NonTarget(Reading::Nothing),
            },
            AssemblyAction::InspectContainer(c) => {
                let empty = self.noisy(next.quantity[c] == 0, rng);
                Observation::NonTarget(Reading::Container { index: c, empty })
            }
            AssemblyAction::Restock(_) | AssemblyAction::BringGlue(_) => Observation::NonTarget(Reading::Nothing),
        };
        StepOutcome { terminal: self.is_terminal(&next), next_state: next, observation, reward }
    }

    fn is_terminal(&self, state: &AssemblyState) -> bool {
        state.trucks_completed() == 2
    }

    /// Replays the history in order: restocks pin a container to capacity,
    /// every worker turn may take one part, and with an exact sensor the
    /// latest reading of a container replaces what was known before. Noisy
    /// readings rule nothing out and are left to the particle filter. Truck
    /// and worker facts only hold on the step that revealed them, since the
    /// worker moves on.
    fn compile_constraints(&self, history: &History<AssemblyObs>) -> AssemblyConstraints {
        let cap = self.config.capacity;
        let exact = self.config.sensor_accuracy >= 1.0;
        let mut c = AssemblyConstraints {
            quantity_bounds: self.config.initial_quantities.map(|q| (q, q)),
            truck: None,
            worker: None,
        };
        for (action, observation) in history.iter() {
            c.worker = None;
            c.truck = None;
            if let Ok(AssemblyAction::Restock(i)) = AssemblyAction::from_id(*action) {
                c.quantity_bounds[i] = (cap, cap);
            }
            for i in (0..CONTAINERS).filter(|&i| self.consumable[i]) {
                c.quantity_bounds[i].0 = c.quantity_bounds[i].0.saturating_sub(1);
            }
            match *observation {
                Observation::Target(w) => {
                    c.worker = Some(w);
                    let part = w.object.part();
                    if let (WorkerAction::Assemble, Some(part), WorkResult::Fail) = (w.action, part, w.result) {
                        for i in (0..CONTAINERS).filter(|&i| self.config.layout[i] == part) {
                            c.quantity_bounds[i] = (0, 0);
                        }
                    }
                    if w.action != WorkerAction::None {
                        c.truck = part.and_then(|p| self.truck_using(p));
                    }
                }
                Observation::NonTarget(_) if !exact => {}
                Observation::NonTarget(Reading::Truck(t)) => c.truck = Some(t),
                Observation::NonTarget(Reading::Container { index, empty }) => {
                    let (lo, hi) = c.quantity_bounds[index];
                    c.quantity_bounds[index] = match (empty, hi) {
                        (true, _) => (0, 0),
                        (false, 0) => (1, cap),
                        (false, _) => (lo.max(1), hi),
                    };
                }
                Observation::NonTarget(Reading::Nothing) => {}
            }
        }
        c
    }

    fn pgs_points(&self, state: &AssemblyState) -> f64 {
        let unfinished = if state.current_truck.is_some() { 0.5 } else { 0.0 };
        state.trucks_completed() as f64 - unfinished - state.empty_and_needed() as f64
    }

    fn is_consistent(&self, state: &AssemblyState, c: &AssemblyConstraints) -> bool {
        let stock_ok = state.quantity.iter().zip(&c.quantity_bounds).all(|(q, (lo, hi))| (lo..=hi).contains(&q));
        stock_ok && c.truck.is_none_or(|t| state.current_truck == Some(t)) && c.worker.is_none_or(|w| state.worker == w)
    }

    /// One of three variations, chosen uniformly: redraw a container's stock,
    /// redraw the worker triple, or swap the current truck. Variations that
    /// contradict the constraints are dropped.
    fn transform_particle<R: Rng + ?Sized>(
        &self,
        state: &AssemblyState,
        rng: &mut R,
        c: &AssemblyConstraints,
    ) -> Option<AssemblyState> {
        self.apply_transform(state, rng).filter(|s| self.is_consistent(s, c))
    }

    fn action_name(&self, action: ActionId) -> String {
        AssemblyAction::from_id(action).map_or_else(|_| action.to_string(), |a| a.to_string())
    }
}

fn red_glued(state: &AssemblyState) -> bool {
    state.completed[Truck::Red.index()]
}

fn blue_glued(state: &AssemblyState) -> bool {
    state.completed[Truck::Blue.index()]
}

impl TargetModel for Assembly {
    type State = AssemblyState;
    type Activity = AssemblyActivity;

    fn advance<R: Rng + ?Sized>(
        &self,
        state: &AssemblyState,
        _rng: &mut R,
    ) -> TargetStep<AssemblyState, AssemblyActivity> {
        let (next, reward) = self.worker_step(state);
        TargetStep { activity: next.worker, state: next, reward }
    }

    fn goal_conditions(&self) -> Vec<GoalCondition<AssemblyState>> {
        vec![
            GoalCondition { name: "red truck glued", predicate: red_glued },
            GoalCondition { name: "blue truck glued", predicate: blue_glued },
        ]
    }
}
