use agr_domains::{Assembly, AssemblyConfig, Maintenance, MaintenanceConfig};

use crate::episode::{run_episode, EpisodeRecord, EpisodeSettings};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainKind {
    Maintenance,
    Assembly,
}

impl std::str::FromStr for DomainKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "maintenance" => Ok(DomainKind::Maintenance),
            "assembly" => Ok(DomainKind::Assembly),
            other => Err(BenchError::Invalid(format!("unknown domain '{other}'"))),
        }
    }
}

/// A fully parameterized domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSetup {
    Maintenance(MaintenanceConfig),
    Assembly(AssemblyConfig),
}

impl DomainSetup {
    pub fn name(&self) -> &'static str {
        match self {
            DomainSetup::Maintenance(_) => "maintenance",
            DomainSetup::Assembly(_) => "assembly",
        }
    }

    /// The swept domain parameter: worker expertise or sensor accuracy.
    pub fn param(&self) -> f64 {
        match self {
            DomainSetup::Maintenance(c) => c.expertise,
            DomainSetup::Assembly(c) => c.sensor_accuracy,
        }
    }

    /// Runs the given episode seeds, in parallel on the current rayon pool.
    /// Records come back in seed order.
    pub fn run_episodes(&self, settings: &EpisodeSettings, seeds: &[u64]) -> Result<Vec<EpisodeRecord>> {
        use rayon::prelude::*;
        match self {
            DomainSetup::Maintenance(c) => {
                let model = Maintenance::new(c.clone())?;
                seeds.par_iter().map(|&s| run_episode(&model, settings, s)).collect()
            }
            DomainSetup::Assembly(c) => {
                let model = Assembly::new(c.clone())?;
                seeds.par_iter().map(|&s| run_episode(&model, settings, s)).collect()
            }
        }
    }
}
