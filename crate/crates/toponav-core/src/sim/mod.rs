//! Deterministic 2D simulation: closed grid world, DDA range sensing,
//! unicycle motion with seeded odometry drift, and a ground-truth-proximity
//! loop recognizer standing in for place recognition.

mod motion;
mod recognizer;
mod sensor;
mod world;

pub use motion::{step, DriftModel, DriftState, MotionCommand, StepOutcome};
pub use recognizer::detect_loop;
pub use sensor::{
    analytic_range_oracle, sense, Beam, RangeScan, SenseError, SensorKind, SensorModel,
    SensorModelError,
};
pub use world::{Cell, World, WorldError};
