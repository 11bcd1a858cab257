//! Budget sweeps: every (planner, domain parameter, simulations) point runs
//! the same episode seeds.

use agr_core::{PlannerConfig, PlannerMode};

use crate::config::Experiment;
use crate::domain::DomainSetup;
use crate::episode::{EpisodeRecord, EpisodeSettings};
use crate::error::Result;
use crate::stats::{summarize, Summary};

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub domain: &'static str,
    pub planner: PlannerMode,
    pub param: f64,
    pub simulations: usize,
    pub summary: Summary,
    pub records: Vec<EpisodeRecord>,
}

impl Experiment {
    pub fn settings(&self, mode: PlannerMode, simulations: usize) -> EpisodeSettings {
        EpisodeSettings {
            planner: PlannerConfig {
                num_simulations: simulations,
                ucb_c: self.ucb_c,
                gamma: self.gamma,
                max_depth: self.max_depth,
                alpha: self.alpha,
                mode,
            },
            max_steps: self.max_steps,
            particles: self.particles,
        }
    }

    /// Episode seeds `seed, seed + 1, ...`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.episodes as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

pub fn run_point(
    experiment: &Experiment,
    domain: &DomainSetup,
    mode: PlannerMode,
    simulations: usize,
) -> Result<PointResult> {
    let settings = experiment.settings(mode, simulations);
    let records = domain.run_episodes(&settings, &experiment.seeds())?;
    Ok(PointResult {
        domain: domain.name(),
        planner: mode,
        param: domain.param(),
        simulations,
        summary: summarize(&records)?,
        records,
    })
}

/// Runs every point; `progress` sees each result as it completes.
pub fn run_sweep(experiment: &Experiment, mut progress: impl FnMut(&PointResult)) -> Result<Vec<PointResult>> {
    let mut results = Vec::new();
    for domain in experiment.domains() {
        for &mode in &experiment.planners {
            for &simulations in &experiment.simulations {
                let point = run_point(experiment, &domain, mode, simulations)?;
                progress(&point);
                results.push(point);
            }
        }
    }
    Ok(results)
}
