use agr_core::{ActionId, GenerativeModel};
use agr_domains::assembly::AssemblyAction;
use agr_domains::maintenance::{MaintenanceAction, Tool};
use agr_domains::{Assembly, AssemblyConfig, Maintenance, MaintenanceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_completion<M: GenerativeModel>(model: &M, episodes: usize, max_steps: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    for _ in 0..episodes {
        let mut state = model.initial_state(&mut rng);
        for _ in 0..max_steps {
            let action = ActionId(rng.random_range(0..model.action_count()));
            let out = model.step(&state, action, &mut rng);
            state = out.next_state;
            if out.terminal {
                done += 1;
                break;
            }
        }
    }
    done as f64 / episodes as f64
}

#[test]
fn random_helpers_nearly_always_finish_the_assembly_task() {
    // The worker recovers from every stall, so uniformly random help finishes
    // within 100 steps almost always and planned help always does.
    let model = Assembly::new(AssemblyConfig::default()).unwrap();
    let rate = random_completion(&model, 2000, 100, 1);
    assert!(rate > 0.95, "{rate}");
}

#[test]
fn random_helpers_finish_maintenance_as_well() {
    let model = Maintenance::new(MaintenanceConfig::default()).unwrap();
    assert!(random_completion(&model, 500, 100, 2) > 0.9);
}

#[test]
fn a_scripted_helper_completes_assembly_cheaply() {
    let model = Assembly::new(AssemblyConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut state = model.initial_state(&mut rng);
    let plan = [
        AssemblyAction::PerceiveWorker,
        AssemblyAction::PerceiveWorker,
        AssemblyAction::BringGlue(model.config().glue[0]),
        AssemblyAction::Restock(0),
        AssemblyAction::Restock(1),
        AssemblyAction::PerceiveWorker,
        AssemblyAction::PerceiveWorker,
        AssemblyAction::BringGlue(model.config().glue[1]),
        AssemblyAction::PerceiveWorker,
        AssemblyAction::PerceiveWorker,
    ];
    let mut total = 0.0;
    for (i, action) in plan.iter().enumerate() {
        let out = model.step(&state, action.id(), &mut rng);
        total += out.reward;
        state = out.next_state;
        assert_eq!(out.terminal, i == plan.len() - 1, "step {i}");
    }
    // Four supplies, six perceptions, two trucks.
    assert_eq!(total, 4.0 * -2.0 + 6.0 * -0.5 + 2.0 * 5.0);
}

#[test]
fn bringing_every_needed_tool_finishes_maintenance() {
    let model = Maintenance::new(MaintenanceConfig { expertise: 0.9, ..MaintenanceConfig::default() }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut finished = 0;
    for _ in 0..200 {
        let mut state = model.initial_state(&mut rng);
        for tool in [Tool::Multimeter, Tool::Screwdriver, Tool::RelayPart] {
            if model.is_terminal(&state) {
                break;
            }
            state = model.step(&state, MaintenanceAction::Bring(tool).id(), &mut rng).next_state;
        }
        for _ in 0..100 {
            if model.is_terminal(&state) {
                finished += 1;
                break;
            }
            state = model.step(&state, MaintenanceAction::Perceive.id(), &mut rng).next_state;
        }
    }
    assert_eq!(finished, 200);
}
