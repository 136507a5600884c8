//! Scenario configuration: JSON-loadable, with defaults matching the
//! simulation-scale experiment setup (5 m local map at 0.1 m resolution,
//! 5 m submap interval, 0.3 m roadmap sample interval, 5 m depth camera).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toponav_core::geom::Point;
use toponav_core::planner::{CostWeights, PlannerParams};
use toponav_core::sim::{DriftModel, SensorKind, SensorModel};
use toponav_core::submap::ComposeParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PoseConfig {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SensorConfig {
    pub max_range: f64,
    pub fov: f64,
    pub angular_resolution: f64,
    pub kind: SensorKind,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            max_range: 5.0,
            fov: std::f64::consts::FRAC_PI_2,
            angular_resolution: std::f64::consts::PI / 180.0,
            kind: SensorKind::DepthCamera,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct DriftConfig {
    pub trans_per_meter: f64,
    pub rot_per_meter: f64,
}

fn default_local_map_size() -> f64 {
    5.0
}
fn default_local_map_resolution() -> f64 {
    0.1
}
fn default_submap_interval() -> f64 {
    5.0
}
fn default_sample_interval() -> f64 {
    0.3
}
fn default_frame_budget() -> u64 {
    10_000
}
fn default_seed() -> u64 {
    42
}
fn default_robot_radius() -> f64 {
    0.15
}
fn default_slope_threshold() -> f64 {
    0.3
}
fn default_roughness_threshold() -> f64 {
    0.01
}
fn default_loop_radius() -> f64 {
    3.0
}
fn default_min_frontier_cells() -> usize {
    3
}
fn default_dt() -> f64 {
    0.1
}
fn default_v_max() -> f64 {
    1.0
}
fn default_w_max() -> f64 {
    1.5
}
fn default_snapshot_scale() -> u32 {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// World file; the CLI `--world` flag overrides it.
    #[serde(default)]
    pub world_file: Option<PathBuf>,
    pub start: PoseConfig,
    pub goal: PoseConfig,
    #[serde(default)]
    pub sensor: SensorConfig,
    #[serde(default)]
    pub drift: DriftConfig,
    #[serde(default = "default_local_map_size")]
    pub local_map_size: f64,
    #[serde(default = "default_local_map_resolution")]
    pub local_map_resolution: f64,
    #[serde(default = "default_submap_interval")]
    pub submap_interval: f64,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    #[serde(default)]
    pub weights: CostWeights,
    #[serde(default = "default_frame_budget")]
    pub frame_budget: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_robot_radius")]
    pub robot_radius: f64,
    #[serde(default = "default_slope_threshold")]
    pub slope_threshold: f64,
    #[serde(default = "default_roughness_threshold")]
    pub roughness_threshold: f64,
    /// Vertex dedup distance; defaults to a third of the sample interval.
    #[serde(default)]
    pub dedup_epsilon: Option<f64>,
    /// Bridge candidate radius; defaults to twice the sample interval.
    #[serde(default)]
    pub connect_radius: Option<f64>,
    /// Coverage disk radius; defaults to 0.75 x sample interval.
    #[serde(default)]
    pub coverage_radius: Option<f64>,
    /// Goal attachment radius; defaults to the sample interval.
    #[serde(default)]
    pub attach_radius: Option<f64>,
    #[serde(default = "default_loop_radius")]
    pub loop_radius: f64,
    #[serde(default = "default_min_frontier_cells")]
    pub min_frontier_cells: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
    #[serde(default = "default_w_max")]
    pub w_max: f64,
    #[serde(default)]
    pub disable_loop_validation: bool,
    #[serde(default = "default_snapshot_scale")]
    pub snapshot_scale: u32,
}

impl ScenarioConfig {
    /// Minimal config: defaults everywhere, start/goal supplied.
    pub fn minimal(start: (f64, f64, f64), goal: (f64, f64)) -> Self {
        serde_json::from_value(serde_json::json!({
            "start": {"x": start.0, "y": start.1, "theta": start.2},
            "goal": {"x": goal.0, "y": goal.1},
        }))
        .expect("minimal config")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ScenarioConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.local_map_size > 0.0 && self.local_map_resolution > 0.0) {
            return Err(ConfigError::Invalid("local map geometry".into()));
        }
        if self.sample_interval < self.local_map_resolution {
            return Err(ConfigError::Invalid(
                "sample_interval below map resolution".into(),
            ));
        }
        if !(self.submap_interval > 0.0 && self.dt > 0.0 && self.frame_budget > 0) {
            return Err(ConfigError::Invalid("intervals must be positive".into()));
        }
        if !self.weights.validate() {
            return Err(ConfigError::Invalid("cost weights".into()));
        }
        Ok(())
    }

    pub fn goal_point(&self) -> Point {
        Point::new(self.goal.x, self.goal.y)
    }

    pub fn sensor_model(&self) -> SensorModel {
        SensorModel {
            max_range: self.sensor.max_range,
            fov: self.sensor.fov,
            angular_resolution: self.sensor.angular_resolution,
            kind: self.sensor.kind,
        }
    }

    pub fn drift_model(&self) -> DriftModel {
        DriftModel {
            trans_drift_per_meter: self.drift.trans_per_meter,
            rot_drift_per_meter: self.drift.rot_per_meter,
            seed: self.seed,
        }
    }

    pub fn dedup_epsilon(&self) -> f64 {
        self.dedup_epsilon.unwrap_or(self.sample_interval / 3.0)
    }

    pub fn connect_radius(&self) -> f64 {
        self.connect_radius.unwrap_or(self.sample_interval * 2.0)
    }

    pub fn coverage_radius(&self) -> f64 {
        self.coverage_radius.unwrap_or(self.sample_interval * 0.75)
    }

    pub fn attach_radius(&self) -> f64 {
        self.attach_radius.unwrap_or(self.sample_interval)
    }

    pub fn compose_params(&self) -> ComposeParams {
        ComposeParams {
            connect_radius: self.connect_radius(),
            dedup_epsilon: self.dedup_epsilon(),
            coverage_radius: self.coverage_radius(),
            check_segments: !self.disable_loop_validation,
        }
    }

    pub fn planner_params(&self) -> PlannerParams {
        PlannerParams {
            attach_radius: self.attach_radius(),
            coverage_radius: self.coverage_radius(),
            weights: self.weights,
        }
    }
}
