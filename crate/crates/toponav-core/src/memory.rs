//! Analytic memory accounting.
//!
//! Benchmarks measure memory as item counts times fixed per-item sizes, not
//! allocator introspection, so the numbers are deterministic and portable.

use crate::local_map::LocalMetricMap;
use crate::roadmap::Roadmap;
use crate::submap::{LocalArea, SubmapStore};
use crate::topology::GlobalTopology;

pub const MAP_CELL_BYTES: usize = 32;
pub const VERTEX_BYTES: usize = 40;
pub const EDGE_BYTES: usize = 24;
pub const TOPO_NODE_BYTES: usize = 56;
pub const TOPO_EDGE_BYTES: usize = 32;
pub const BEAM_BYTES: usize = 24;
pub const POSE_BYTES: usize = 32;

pub fn local_map_bytes(map: &LocalMetricMap) -> usize {
    map.cell_count() * MAP_CELL_BYTES
}

pub fn roadmap_bytes(roadmap: &Roadmap) -> usize {
    roadmap.vertices.len() * VERTEX_BYTES + roadmap.edges.len() * EDGE_BYTES
}

pub fn local_area_bytes(area: &LocalArea) -> usize {
    roadmap_bytes(&area.merged_roadmap)
}

pub fn store_bytes(store: &SubmapStore) -> usize {
    store
        .iter()
        .map(|s| roadmap_bytes(&s.roadmap) + POSE_BYTES * 2)
        .sum()
}

pub fn topology_bytes(topology: &GlobalTopology) -> usize {
    topology.node_count() * TOPO_NODE_BYTES + topology.edges().len() * TOPO_EDGE_BYTES
}
