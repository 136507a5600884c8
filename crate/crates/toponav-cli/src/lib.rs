//! IO, file formats, rendering, and the benchmark scenario runner around
//! `toponav-core`.

pub mod config;
pub mod render;
pub mod scenario;
pub mod snapshot;
pub mod store_io;
pub mod world_io;
pub mod worlds;

pub use config::ScenarioConfig;
pub use scenario::{run_baseline, run_greedy, run_scenario, Outcome, RunResult};
