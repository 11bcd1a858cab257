//! Run options from a TOML file and the command line. Every key is optional
//! in both places; a flag given on the command line replaces the file value.

use std::fs;
use std::path::{Path, PathBuf};

use agr_core::{PlannerMode, DEFAULT_PARTICLES};
use agr_domains::maintenance::expertise_level;
use agr_domains::{AssemblyConfig, MaintenanceConfig};
use clap::Args;
use serde::{Deserialize, Deserializer};

use crate::domain::{DomainKind, DomainSetup};
use crate::error::{BenchError, Result};

/// Default budget sweep: 32 to 8192 by doubling.
pub fn default_simulations() -> Vec<usize> {
    (5..=13).map(|k| 1usize << k).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunOptions {
    /// TOML file with any of these options (keys as spelled on the command line).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// maintenance | assembly
    #[arg(long)]
    pub domain: Option<String>,
    /// Comma-separated planners: pomcp, pgs.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "list_or_string")]
    pub planner: Option<Vec<String>>,
    /// Comma-separated simulation budgets per step.
    #[arg(long, value_delimiter = ',')]
    pub sims: Option<Vec<usize>>,
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Base seed; episode i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub ucb_c: Option<f64>,
    /// Potential scale for the pgs planner.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub particles: Option<usize>,
    /// Search horizon in steps.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Comma-separated worker expertise levels: low, medium, high or a probability.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "list_or_string")]
    pub expertise: Option<Vec<String>>,
    /// Assembly sensor accuracy.
    #[arg(long)]
    pub accuracy: Option<f64>,
    /// Assembly container capacity.
    #[arg(long)]
    pub capacity: Option<u8>,
    /// Maintenance fetch duration in worker turns.
    #[arg(long)]
    pub fetch_cost: Option<usize>,
    /// Worker threads for episode parallelism (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn list_or_string<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<String>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(String),
        Many(Vec<String>),
    }
    Ok(Some(match Raw::deserialize(d)? {
        Raw::One(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
        Raw::Many(v) => v,
    }))
}

macro_rules! prefer {
    ($cli:ident, $file:ident, $($field:ident),+) => {
        RunOptions { $($field: $cli.$field.or($file.$field)),+ }
    };
}

impl RunOptions {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| BenchError::Config { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Command-line values win over `file`.
    pub fn over(self, file: RunOptions) -> RunOptions {
        let cli = self;
        prefer!(
            cli, file, config, domain, planner, sims, episodes, max_steps, seed, gamma, ucb_c, alpha, particles,
            max_depth, expertise, accuracy, capacity, fetch_cost, threads, out
        )
    }

    /// Reads the referenced config file, if any, and merges under `self`.
    pub fn load(self) -> Result<RunOptions> {
        match &self.config {
            Some(path) => {
                let file = RunOptions::from_file(path)?;
                Ok(self.over(file))
            }
            None => Ok(self),
        }
    }

    pub fn resolve(self) -> Result<Experiment> {
        let domain: DomainKind = self.domain.as_deref().unwrap_or("maintenance").parse()?;
        let planners = match self.planner {
            Some(names) => names.iter().map(|n| n.parse::<PlannerMode>()).collect::<agr_core::Result<Vec<_>>>()?,
            None => vec![PlannerMode::Pomcp, PlannerMode::Pgs],
        };
        let expertise = match self.expertise {
            Some(names) => names.iter().map(|n| expertise_level(n)).collect::<agr_core::Result<Vec<_>>>()?,
            None => vec![MaintenanceConfig::default().expertise],
        };
        let experiment = Experiment {
            domain,
            planners,
            simulations: self.sims.unwrap_or_else(default_simulations),
            episodes: self.episodes.unwrap_or(100),
            max_steps: self.max_steps.unwrap_or(100),
            seed: self.seed.unwrap_or(0),
            gamma: self.gamma.unwrap_or(0.95),
            ucb_c: self.ucb_c.unwrap_or(5.0),
            alpha: self.alpha.unwrap_or(10.0),
            particles: self.particles.unwrap_or(DEFAULT_PARTICLES),
            max_depth: self.max_depth.unwrap_or(100),
            expertise,
            accuracy: self.accuracy.unwrap_or(AssemblyConfig::default().sensor_accuracy),
            capacity: self.capacity.unwrap_or(AssemblyConfig::default().capacity),
            fetch_cost: self.fetch_cost.unwrap_or(MaintenanceConfig::default().fetch_cost_steps),
            threads: self.threads,
            out: self.out,
        };
        experiment.validate()?;
        Ok(experiment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub domain: DomainKind,
    pub planners: Vec<PlannerMode>,
    pub simulations: Vec<usize>,
    pub episodes: usize,
    pub max_steps: usize,
    pub seed: u64,
    pub gamma: f64,
    pub ucb_c: f64,
    pub alpha: f64,
    pub particles: usize,
    pub max_depth: usize,
    pub expertise: Vec<f64>,
    pub accuracy: f64,
    pub capacity: u8,
    pub fetch_cost: usize,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for Experiment {
    fn default() -> Self {
        RunOptions::default().resolve().expect("defaults are valid")
    }
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.episodes < 1 {
            return Err(BenchError::Invalid("episodes must be at least 1".into()));
        }
        if self.simulations.is_empty() || self.simulations.contains(&0) {
            return Err(BenchError::Invalid("simulation budgets must be at least 1".into()));
        }
        if self.planners.is_empty() {
            return Err(BenchError::Invalid("no planner selected".into()));
        }
        if self.particles < 1 {
            return Err(BenchError::Invalid("particles must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Invalid("threads must be at least 1".into()));
        }
        self.settings(self.planners[0], self.simulations[0]).planner.validate()?;
        for domain in self.domains() {
            match domain {
                DomainSetup::Maintenance(c) => c.validate()?,
                DomainSetup::Assembly(c) => agr_domains::Assembly::new(c).map(|_| ())?,
            }
        }
        Ok(())
    }

    /// One domain instance per swept parameter value.
    pub fn domains(&self) -> Vec<DomainSetup> {
        match self.domain {
            DomainKind::Maintenance => self
                .expertise
                .iter()
                .map(|&expertise| {
                    DomainSetup::Maintenance(MaintenanceConfig {
                        expertise,
                        fetch_cost_steps: self.fetch_cost,
                        ..MaintenanceConfig::default()
                    })
                })
                .collect(),
            DomainKind::Assembly => vec![DomainSetup::Assembly(AssemblyConfig {
                sensor_accuracy: self.accuracy,
                capacity: self.capacity,
                ..AssemblyConfig::default()
            })],
        }
    }
}
