//! Benchmark domains: a maintenance helper that fetches tools and an
//! assembly helper that keeps part containers stocked.

pub mod assembly;
pub mod maintenance;

pub use assembly::{Assembly, AssemblyConfig};
pub use maintenance::{Maintenance, MaintenanceConfig};
