//! Hierarchical topological mapping and planning for navigation in unknown
//! environments under odometry drift.
//!
//! Instead of one global metric map, the representation keeps a fixed-size
//! robot-centric metric window ([`LocalMetricMap`]) for obstacle avoidance and
//! accumulates a sparse roadmap into anchored [`Submap`]s. Submaps are linked
//! by a coarse [`GlobalTopology`] whose loop edges are admitted only after a
//! connectivity check, and drift corrections are pure anchor-coordinate
//! updates: no metric cell is ever re-integrated.
//!
//! The crate is `no_std`-compatible (`alloc` required); the companion CLI
//! crate carries file formats, the deterministic 2D simulation harness's IO,
//! and the benchmark runner.
//!
//! Layers, bottom up:
//!
//! - [`sim`]: deterministic grid world, DDA ray sensing, unicycle motion with
//!   seeded odometry drift, and a ground-truth-proximity loop recognizer.
//! - [`local_map`] / [`traversability`] / [`roadmap`] / [`frontier`]: the
//!   robot-centric dense window, slope/roughness analysis, obstacle
//!   inflation, uniform roadmap sampling, and wavefront frontier detection.
//! - [`submap`]: anchored submaps, incremental merging, local-area
//!   composition, and frontier reconciliation.
//! - [`topology`]: the submap graph, loop-connectivity validation, and
//!   rigid-shift loop correction.
//! - [`planner`]: backtracing (A* on the known roadmap) and exploration
//!   (frontier utility + waypoint chaining) modes.
//! - [`baseline`]: a growing global-grid mapper that re-integrates history on
//!   correction, used as the comparison target in benchmarks.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baseline;
pub mod frontier;
pub mod geom;
pub mod grid;
pub mod local_map;
mod mathx;
pub mod memory;
pub mod planner;
pub mod roadmap;
pub mod sim;
pub mod submap;
pub mod topology;
pub mod traversability;

pub use geom::{Frame, Point, Pose2};
pub use local_map::{CellState, LocalMetricMap};
pub use roadmap::{Roadmap, RoadmapVertex};
pub use submap::{LocalArea, Submap, SubmapId, SubmapStore};
pub use topology::GlobalTopology;
pub use traversability::TraversabilityGrid;
