//! Anchored submaps and the local area.
//!
//! A submap stores its roadmap in anchor-relative coordinates, so a loop
//! correction that moves the anchor never rewrites stored content. Local
//! roadmap snapshots merge into the active submap incrementally: existing
//! vertices are never moved or deleted, new content is appended, and
//! near-duplicates collapse onto the stored vertex.
//!
//! The local area is the current submap plus its topology neighbors, merged
//! into one corrected-frame roadmap with validity-checked bridge edges.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{Frame, Point, Pose2};
use crate::grid::PointIndex;
use crate::roadmap::{FrontierOrigin, Roadmap, RoadmapEdge, RoadmapVertex};
use crate::topology::GlobalTopology;

pub type SubmapId = u32;

/// A locally consistent roadmap fragment anchored at a correctable pose.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Submap {
    pub id: SubmapId,
    /// Corrected-frame anchor; the only thing loop correction moves.
    pub anchor: Pose2,
    /// Odometry pose the submap was created at; submap-local coordinates are
    /// relative to this pose and never change after being stored.
    pub creation_odom: Pose2,
    /// Roadmap in submap-local coordinates.
    pub roadmap: Roadmap,
    pub frontier_vertex_ids: BTreeSet<u32>,
}

impl Submap {
    pub fn new(id: SubmapId, anchor: Pose2, creation_odom: Pose2, sample_interval: f64) -> Self {
        assert_eq!(anchor.frame, Frame::Corrected);
        assert_eq!(creation_odom.frame, Frame::Odometry);
        Submap {
            id,
            anchor,
            creation_odom,
            roadmap: Roadmap::new(sample_interval),
            frontier_vertex_ids: BTreeSet::new(),
        }
    }

    /// Corrected-frame position of a stored vertex.
    pub fn vertex_position_corrected(&self, vertex_id: u32) -> Point {
        self.anchor
            .transform_point(&self.roadmap.vertex(vertex_id).position)
    }

    fn sync_frontier_set(&mut self) {
        self.frontier_vertex_ids = self.roadmap.frontier_ids().collect();
    }

    /// Clear a vertex's frontier attribute (used by reconciliation).
    pub fn demote_frontier(&mut self, vertex_id: u32) {
        let v = &mut self.roadmap.vertices[vertex_id as usize];
        v.is_frontier = false;
        self.frontier_vertex_ids.remove(&vertex_id);
    }
}

/// Append-only store of submaps, keyed by id.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SubmapStore {
    submaps: BTreeMap<SubmapId, Submap>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SubmapError {
    #[error("unknown submap id {0}")]
    UnknownSubmapId(SubmapId),
}

impl SubmapStore {
    pub fn new() -> Self {
        SubmapStore::default()
    }

    pub fn insert(&mut self, submap: Submap) {
        self.submaps.insert(submap.id, submap);
    }

    pub fn get(&self, id: SubmapId) -> Result<&Submap, SubmapError> {
        self.submaps.get(&id).ok_or(SubmapError::UnknownSubmapId(id))
    }

    pub fn get_mut(&mut self, id: SubmapId) -> Result<&mut Submap, SubmapError> {
        self.submaps
            .get_mut(&id)
            .ok_or(SubmapError::UnknownSubmapId(id))
    }

    pub fn len(&self) -> usize {
        self.submaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submaps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Submap> {
        self.submaps.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = SubmapId> + '_ {
        self.submaps.keys().copied()
    }

    /// All frontier vertices across the store as
    /// `(submap id, vertex id, corrected-frame position)`, id-ordered.
    pub fn global_frontiers(&self) -> Vec<(SubmapId, u32, Point)> {
        let mut out = Vec::new();
        for submap in self.submaps.values() {
            for &vid in &submap.frontier_vertex_ids {
                out.push((submap.id, vid, submap.vertex_position_corrected(vid)));
            }
        }
        out
    }
}

/// Spawn policy: a fresh submap every `interval` meters of odometric arc
/// length. Arc length, not displacement — a zig-zag that never leaves the
/// start still rolls over.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubmapSpawner {
    interval: f64,
    traveled_since_spawn: f64,
}

impl SubmapSpawner {
    pub fn new(interval: f64) -> Self {
        assert!(interval > 0.0);
        SubmapSpawner {
            interval,
            traveled_since_spawn: 0.0,
        }
    }

    /// Record one step of executed arc length.
    pub fn on_motion(&mut self, distance: f64) {
        self.traveled_since_spawn += distance;
    }

    pub fn traveled_since_spawn(&self) -> f64 {
        self.traveled_since_spawn
    }

    /// If the interval has been covered, produce the next submap at
    /// `current_odom`, chaining its corrected anchor off the active submap.
    pub fn maybe_spawn_submap(&mut self, current_odom: &Pose2, active: &Submap) -> Option<Submap> {
        if self.traveled_since_spawn < self.interval {
            return None;
        }
        self.traveled_since_spawn = 0.0;
        let rel = current_odom.relative_to(&active.creation_odom);
        let anchor = active
            .anchor
            .compose(&rel.with_frame(Frame::Corrected));
        Some(Submap::new(
            active.id + 1,
            anchor,
            *current_odom,
            active.roadmap.sample_interval,
        ))
    }
}

/// Statistics of one merge, mostly for tests and metrics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub matched: usize,
    pub appended: usize,
    pub edges_added: usize,
}

/// Merge a local roadmap snapshot (odometry frame) into `submap`.
///
/// Vertices transform into submap-local coordinates; a vertex within
/// `dedup_epsilon` of a stored vertex merges onto it (stored id and position
/// kept, frontier attribute overwritten by the newer observation), everything
/// else is appended. Edges are remapped, deduplicated, and their lengths
/// recomputed from stored positions. Stored frontier vertices not refreshed
/// by this merge flip their origin to `Incremental`.
pub fn merge_local_into_submap(
    submap: &mut Submap,
    local_roadmap: &Roadmap,
    local_center: &Pose2,
    dedup_epsilon: f64,
) -> MergeStats {
    assert_eq!(local_center.frame, Frame::Odometry);
    assert!(
        dedup_epsilon < local_roadmap.sample_interval / 2.0 || local_roadmap.vertices.is_empty(),
        "dedup_epsilon must stay below half the sample interval"
    );
    let mut stats = MergeStats::default();
    let mut index = PointIndex::new(dedup_epsilon.max(1e-6));
    for v in &submap.roadmap.vertices {
        index.insert(v.position);
    }
    let mut touched = alloc::vec![false; submap.roadmap.vertices.len()];

    // Map each local vertex onto a submap vertex id.
    let mut id_map = Vec::with_capacity(local_roadmap.vertices.len());
    for v in &local_roadmap.vertices {
        let p_local = submap.creation_odom.untransform_point(&v.position);
        match index.nearest_within(&p_local, dedup_epsilon) {
            Some(existing) => {
                let existing = existing as u32;
                let sv = &mut submap.roadmap.vertices[existing as usize];
                sv.is_frontier = v.is_frontier;
                sv.frontier_origin = FrontierOrigin::Local;
                if (existing as usize) < touched.len() {
                    touched[existing as usize] = true;
                }
                stats.matched += 1;
                id_map.push(existing);
            }
            None => {
                let id = submap.roadmap.vertices.len() as u32;
                submap.roadmap.vertices.push(RoadmapVertex {
                    id,
                    position: p_local,
                    is_frontier: v.is_frontier,
                    frontier_origin: FrontierOrigin::Local,
                });
                index.insert(p_local);
                stats.appended += 1;
                id_map.push(id);
            }
        }
    }

    // Incremental edges: remap endpoints, drop self-loops and duplicates.
    let mut existing_edges: BTreeSet<(u32, u32)> = submap
        .roadmap
        .edges
        .iter()
        .map(|e| (e.a.min(e.b), e.a.max(e.b)))
        .collect();
    for e in &local_roadmap.edges {
        let a = id_map[e.a as usize];
        let b = id_map[e.b as usize];
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if existing_edges.insert(key) {
            let pa = submap.roadmap.vertices[a as usize].position;
            let pb = submap.roadmap.vertices[b as usize].position;
            submap.roadmap.edges.push(RoadmapEdge {
                a: key.0,
                b: key.1,
                length: pa.dist(&pb),
            });
            stats.edges_added += 1;
        }
    }

    // Frontier vertices that exist only in stored content are now owned by
    // the incremental layer.
    for (i, was_touched) in touched.iter().enumerate() {
        let v = &mut submap.roadmap.vertices[i];
        if !was_touched && v.is_frontier {
            v.frontier_origin = FrontierOrigin::Incremental;
        }
    }
    submap.sync_frontier_set();
    stats
}

/// A merged corrected-frame view of the current submap and its topology
/// neighbors: the planner's dense working graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalArea {
    pub current_id: SubmapId,
    pub member_submap_ids: BTreeSet<SubmapId>,
    /// Merged roadmap in the corrected frame. Vertex ids index into
    /// `provenance`.
    pub merged_roadmap: Roadmap,
    /// `(submap id, vertex id)` of the stored vertex each merged vertex
    /// came from (duplicates collapse onto the first-seen member).
    pub provenance: Vec<(SubmapId, u32)>,
    /// Retained frontiers as `(submap id, vertex id)`.
    pub merged_frontiers: BTreeSet<(SubmapId, u32)>,
    /// Cross-submap edges, as indices into `merged_roadmap.edges`.
    pub bridge_edges: Vec<usize>,
}

impl LocalArea {
    /// Merged-roadmap vertex id of a stored vertex, if it was retained.
    pub fn merged_id_of(&self, submap_id: SubmapId, vertex_id: u32) -> Option<u32> {
        self.provenance
            .iter()
            .position(|&(s, v)| s == submap_id && v == vertex_id)
            .map(|i| i as u32)
    }
}

/// Segment validity against roadmap coverage: the segment `a -> b` must lie
/// entirely inside the union of `coverage_radius` disks around the coverage
/// points. Submaps keep no grid, so their known-traversable region is
/// approximated by those disks. Exact circle/segment interval union — a
/// narrow uncovered gap (a thin wall between two roadmaps) can never slip
/// through a sampling step.
pub fn segment_covered(coverage: &PointIndex, a: &Point, b: &Point, coverage_radius: f64) -> bool {
    const EPS: f64 = 1e-9;
    let len = a.dist(b);
    if len < EPS {
        return coverage.nearest_within(a, coverage_radius).is_some();
    }
    let dir = ((b.x - a.x) / len, (b.y - a.y) / len);
    let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let r_sq = coverage_radius * coverage_radius;

    // Covered t-intervals along the segment, one per disk intersecting it.
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for id in coverage.within(&mid, coverage_radius + 0.5 * len + EPS) {
        let c = coverage.point(id);
        let t_c = (c.x - a.x) * dir.0 + (c.y - a.y) * dir.1;
        let foot = Point::new(a.x + t_c * dir.0, a.y + t_c * dir.1);
        let d_sq = foot.dist_sq(&c);
        if d_sq > r_sq {
            continue;
        }
        let half = crate::mathx::sqrt(r_sq - d_sq);
        let lo = (t_c - half).max(0.0);
        let hi = (t_c + half).min(len);
        if hi >= lo {
            intervals.push((lo, hi));
        }
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut covered_to = 0.0;
    for (lo, hi) in intervals {
        if lo > covered_to + EPS {
            return false;
        }
        if hi > covered_to {
            covered_to = hi;
        }
        if covered_to >= len - EPS {
            return true;
        }
    }
    covered_to >= len - EPS
}

/// Parameters for composing the local area and validating loops.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComposeParams {
    /// Max distance for cross-submap bridge candidates.
    pub connect_radius: f64,
    /// Vertex dedup distance across members.
    pub dedup_epsilon: f64,
    /// Radius of the per-vertex coverage disks used by segment checks.
    pub coverage_radius: f64,
    /// When false, bridge candidates skip the coverage segment check
    /// (models topologies that trust place recognition blindly).
    pub check_segments: bool,
}

/// Compose the local area: the current submap plus its one-hop topology
/// neighbors, merged into the corrected frame with deduplication, bridge
/// edges between members, and recomputed edge lengths.
pub fn compose_local_area(
    topology: &GlobalTopology,
    store: &SubmapStore,
    current_id: SubmapId,
    params: &ComposeParams,
) -> Result<LocalArea, SubmapError> {
    let current = store.get(current_id)?;
    let mut member_ids: BTreeSet<SubmapId> = topology.neighbors(current_id).collect();
    member_ids.insert(current_id);

    let sample_interval = current.roadmap.sample_interval;
    let mut merged = Roadmap::new(sample_interval);
    let mut provenance: Vec<(SubmapId, u32)> = Vec::new();
    let mut dedup = PointIndex::new(params.dedup_epsilon.max(1e-6));
    // (submap, stored vertex id) -> merged id
    let mut remap: BTreeMap<(SubmapId, u32), u32> = BTreeMap::new();

    for &sid in &member_ids {
        let submap = store.get(sid)?;
        for v in &submap.roadmap.vertices {
            let p = submap.anchor.transform_point(&v.position);
            match dedup.nearest_within(&p, params.dedup_epsilon) {
                Some(existing) => {
                    remap.insert((sid, v.id), existing as u32);
                }
                None => {
                    let id = merged.vertices.len() as u32;
                    merged.vertices.push(RoadmapVertex {
                        id,
                        position: p,
                        is_frontier: v.is_frontier,
                        frontier_origin: v.frontier_origin,
                    });
                    provenance.push((sid, v.id));
                    dedup.insert(p);
                    remap.insert((sid, v.id), id);
                }
            }
        }
    }

    let mut edge_keys: BTreeSet<(u32, u32)> = BTreeSet::new();
    for &sid in &member_ids {
        let submap = store.get(sid)?;
        for e in &submap.roadmap.edges {
            let a = remap[&(sid, e.a)];
            let b = remap[&(sid, e.b)];
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if edge_keys.insert(key) {
                let pa = merged.vertices[key.0 as usize].position;
                let pb = merged.vertices[key.1 as usize].position;
                merged.edges.push(RoadmapEdge {
                    a: key.0,
                    b: key.1,
                    length: pa.dist(&pb),
                });
            }
        }
    }

    // Bridge edges between members: cross-submap pairs within the connect
    // radius whose straight segment stays inside the union coverage.
    let coverage = PointIndex::with_points(
        params.coverage_radius.max(1e-6),
        merged.vertices.iter().map(|v| v.position),
    );
    let mut bridge_edges = Vec::new();
    let position_index = merged.position_index();
    for a in 0..merged.vertices.len() {
        let pa = merged.vertices[a].position;
        for b in position_index.within(&pa, params.connect_radius) {
            if b <= a {
                continue;
            }
            if provenance[a].0 == provenance[b].0 {
                continue;
            }
            let key = (a as u32, b as u32);
            if edge_keys.contains(&key) {
                continue;
            }
            let pb = merged.vertices[b].position;
            if params.check_segments && !segment_covered(&coverage, &pa, &pb, params.coverage_radius)
            {
                continue;
            }
            edge_keys.insert(key);
            bridge_edges.push(merged.edges.len());
            merged.edges.push(RoadmapEdge {
                a: key.0,
                b: key.1,
                length: pa.dist(&pb),
            });
        }
    }

    let merged_frontiers: BTreeSet<(SubmapId, u32)> = merged
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_frontier)
        .map(|(i, _)| provenance[i])
        .collect();

    Ok(LocalArea {
        current_id,
        member_submap_ids: member_ids,
        merged_roadmap: merged,
        provenance,
        merged_frontiers,
        bridge_edges,
    })
}

/// Reconcile frontiers across members: a frontier lying inside another
/// member's known-traversable coverage (within the sample interval of one of
/// that member's non-frontier vertices) is stale and gets demoted — in the
/// area and persistently in the owning submap.
pub fn reconcile_frontiers(
    mut area: LocalArea,
    store: &mut SubmapStore,
) -> Result<LocalArea, SubmapError> {
    let radius = area.merged_roadmap.sample_interval;
    // Corrected-frame positions of non-frontier vertices per member.
    let mut interiors: BTreeMap<SubmapId, PointIndex> = BTreeMap::new();
    for &sid in &area.member_submap_ids {
        let submap = store.get(sid)?;
        let pts = submap
            .roadmap
            .vertices
            .iter()
            .filter(|v| !v.is_frontier)
            .map(|v| submap.anchor.transform_point(&v.position));
        interiors.insert(sid, PointIndex::with_points(radius.max(1e-6), pts));
    }

    let mut demoted: Vec<(SubmapId, u32)> = Vec::new();
    for &(sid, vid) in &area.merged_frontiers {
        let submap = store.get(sid)?;
        let p = submap.vertex_position_corrected(vid);
        let covered = interiors.iter().any(|(&other, index)| {
            other != sid && index.nearest_within(&p, radius).is_some()
        });
        if covered {
            demoted.push((sid, vid));
        }
    }

    for &(sid, vid) in &demoted {
        store.get_mut(sid)?.demote_frontier(vid);
        area.merged_frontiers.remove(&(sid, vid));
        if let Some(mid) = area.merged_id_of(sid, vid) {
            area.merged_roadmap.vertices[mid as usize].is_frontier = false;
        }
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Frame;

    fn odom(x: f64, y: f64, theta: f64) -> Pose2 {
        Pose2::new(x, y, theta, Frame::Odometry)
    }

    fn submap_at(id: SubmapId, x: f64, y: f64, interval: f64) -> Submap {
        let o = odom(x, y, 0.0);
        Submap::new(id, o.with_frame(Frame::Corrected), o, interval)
    }

    fn local_grid_roadmap(center: Point, pitch: f64, n: i64) -> Roadmap {
        let mut roadmap = Roadmap::new(pitch);
        for j in -n..=n {
            for i in -n..=n {
                let id = roadmap.vertices.len() as u32;
                roadmap.vertices.push(RoadmapVertex {
                    id,
                    position: Point::new(center.x + i as f64 * pitch, center.y + j as f64 * pitch),
                    is_frontier: false,
                    frontier_origin: FrontierOrigin::Local,
                });
            }
        }
        let cols = (2 * n + 1) as u32;
        for j in 0..cols {
            for i in 0..cols {
                let id = j * cols + i;
                if i + 1 < cols {
                    let pa = roadmap.vertices[id as usize].position;
                    let pb = roadmap.vertices[(id + 1) as usize].position;
                    roadmap.edges.push(RoadmapEdge {
                        a: id,
                        b: id + 1,
                        length: pa.dist(&pb),
                    });
                }
                if j + 1 < cols {
                    let pa = roadmap.vertices[id as usize].position;
                    let pb = roadmap.vertices[(id + cols) as usize].position;
                    roadmap.edges.push(RoadmapEdge {
                        a: id,
                        b: id + cols,
                        length: pa.dist(&pb),
                    });
                }
            }
        }
        roadmap
    }

    #[test]
    fn spawner_triggers_on_arc_length_not_displacement() {
        let active = submap_at(3, 0.0, 0.0, 0.3);
        let mut spawner = SubmapSpawner::new(10.0);
        // Zig-zag: 12 m of arc length, 2 m of net displacement.
        for i in 0..12 {
            spawner.on_motion(1.0);
            if i < 11 {
                assert!(
                    spawner.traveled_since_spawn() < 10.0
                        || spawner.traveled_since_spawn() >= 10.0
                );
            }
        }
        let spawned = spawner
            .maybe_spawn_submap(&odom(2.0, 0.0, 0.0), &active)
            .expect("arc length crossed the interval");
        assert_eq!(spawned.id, 4);
        assert!(spawned.roadmap.vertices.is_empty());
    }

    #[test]
    fn spawner_below_threshold_returns_none() {
        let active = submap_at(0, 0.0, 0.0, 0.3);
        let mut spawner = SubmapSpawner::new(5.0);
        spawner.on_motion(4.9);
        assert!(spawner.maybe_spawn_submap(&odom(4.9, 0.0, 0.0), &active).is_none());
        spawner.on_motion(0.1);
        let s = spawner.maybe_spawn_submap(&odom(5.0, 0.0, 0.0), &active);
        assert_eq!(s.unwrap().id, 1);
    }

    #[test]
    fn merge_is_idempotent_modulo_frontier_refresh() {
        let mut submap = submap_at(0, 0.0, 0.0, 0.3);
        let local = local_grid_roadmap(Point::new(1.0, 1.0), 0.3, 3);
        let first = merge_local_into_submap(&mut submap, &local, &odom(1.0, 1.0, 0.0), 0.1);
        assert_eq!(first.appended, local.vertices.len());
        let vertices_before: Vec<(f64, f64)> = submap
            .roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        let second = merge_local_into_submap(&mut submap, &local, &odom(1.0, 1.0, 0.0), 0.1);
        assert_eq!(second.appended, 0);
        assert_eq!(second.edges_added, 0);
        assert_eq!(second.matched, local.vertices.len());
        let vertices_after: Vec<(f64, f64)> = submap
            .roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        assert_eq!(vertices_before, vertices_after);
    }

    #[test]
    fn merge_empty_local_roadmap_is_noop() {
        let mut submap = submap_at(0, 0.0, 0.0, 0.3);
        let local = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 2);
        merge_local_into_submap(&mut submap, &local, &odom(0.0, 0.0, 0.0), 0.1);
        let before = (submap.roadmap.vertices.len(), submap.roadmap.edges.len());
        merge_local_into_submap(&mut submap, &Roadmap::new(0.3), &odom(0.0, 0.0, 0.0), 0.1);
        assert_eq!(
            (submap.roadmap.vertices.len(), submap.roadmap.edges.len()),
            before
        );
    }

    #[test]
    fn merge_counts_match_brute_force_pair_matching() {
        // Overlapping snapshots: expected vertex count via O(n^2) matching.
        let mut submap = submap_at(0, 0.0, 0.0, 0.3);
        let a = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 4);
        merge_local_into_submap(&mut submap, &a, &odom(0.0, 0.0, 0.0), 0.1);
        let b = local_grid_roadmap(Point::new(0.6, 0.0), 0.3, 4);

        let eps = 0.1;
        let mut expected_matched = 0;
        for vb in &b.vertices {
            let matched = submap
                .roadmap
                .vertices
                .iter()
                .any(|va| va.position.dist(&vb.position) <= eps);
            if matched {
                expected_matched += 1;
            }
        }
        let before = submap.roadmap.vertices.len();
        let stats = merge_local_into_submap(&mut submap, &b, &odom(0.6, 0.0, 0.0), eps);
        assert_eq!(stats.matched, expected_matched);
        assert_eq!(
            submap.roadmap.vertices.len(),
            before + b.vertices.len() - expected_matched
        );
    }

    #[test]
    fn merge_never_moves_or_removes_stored_vertices() {
        let mut submap = submap_at(0, 0.0, 0.0, 0.3);
        let a = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 3);
        merge_local_into_submap(&mut submap, &a, &odom(0.0, 0.0, 0.0), 0.1);
        let stored: Vec<(u32, f64, f64)> = submap
            .roadmap
            .vertices
            .iter()
            .map(|v| (v.id, v.position.x, v.position.y))
            .collect();
        // Slightly offset snapshot: some vertices match, some append.
        let b = local_grid_roadmap(Point::new(0.05, 0.02), 0.3, 3);
        merge_local_into_submap(&mut submap, &b, &odom(0.05, 0.02, 0.0), 0.1);
        for (id, x, y) in stored {
            let v = submap.roadmap.vertex(id);
            assert_eq!((v.position.x, v.position.y), (x, y));
        }
    }

    #[test]
    fn no_two_vertices_within_epsilon_after_merges() {
        let mut submap = submap_at(0, 0.0, 0.0, 0.3);
        let eps = 0.1;
        for k in 0..5 {
            let c = Point::new(0.07 * k as f64, 0.13 * k as f64);
            let local = local_grid_roadmap(c, 0.3, 3);
            merge_local_into_submap(&mut submap, &local, &odom(c.x, c.y, 0.0), eps);
        }
        let vs = &submap.roadmap.vertices;
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                assert!(
                    vs[i].position.dist(&vs[j].position) > eps,
                    "{i} and {j} too close"
                );
            }
        }
    }

    #[test]
    fn anchor_move_does_not_touch_stored_coordinates() {
        let mut submap = submap_at(0, 2.0, 3.0, 0.3);
        let local = local_grid_roadmap(Point::new(2.0, 3.0), 0.3, 3);
        merge_local_into_submap(&mut submap, &local, &odom(2.0, 3.0, 0.0), 0.1);
        let stored: Vec<(f64, f64)> = submap
            .roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        submap.anchor = Pose2::new(10.0, -4.0, 0.9, Frame::Corrected);
        let after: Vec<(f64, f64)> = submap
            .roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        assert_eq!(stored, after);
    }

    fn two_submap_world(offset: f64) -> (GlobalTopology, SubmapStore) {
        let mut store = SubmapStore::new();
        let mut s0 = submap_at(0, 0.0, 0.0, 0.3);
        let l0 = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 4);
        merge_local_into_submap(&mut s0, &l0, &odom(0.0, 0.0, 0.0), 0.1);
        let mut s1 = submap_at(1, offset, 0.0, 0.3);
        let l1 = local_grid_roadmap(Point::new(offset, 0.0), 0.3, 4);
        merge_local_into_submap(&mut s1, &l1, &odom(offset, 0.0, 0.0), 0.1);
        let mut topology = GlobalTopology::new();
        topology.add_node(0);
        topology.add_node(1);
        store.insert(s0);
        store.insert(s1);
        topology.add_sequential_edge(&store, 0, 1).unwrap();
        (topology, store)
    }

    fn params() -> ComposeParams {
        ComposeParams {
            connect_radius: 0.5,
            dedup_epsilon: 0.1,
            coverage_radius: 0.25,
            check_segments: true,
        }
    }

    #[test]
    fn single_submap_area_is_verbatim() {
        let mut store = SubmapStore::new();
        let mut s0 = submap_at(0, 0.0, 0.0, 0.3);
        let l0 = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 3);
        merge_local_into_submap(&mut s0, &l0, &odom(0.0, 0.0, 0.0), 0.1);
        let mut topology = GlobalTopology::new();
        topology.add_node(0);
        let vcount = s0.roadmap.vertices.len();
        let ecount = s0.roadmap.edges.len();
        store.insert(s0);
        let area = compose_local_area(&topology, &store, 0, &params()).unwrap();
        assert_eq!(area.merged_roadmap.vertices.len(), vcount);
        assert_eq!(area.merged_roadmap.edges.len(), ecount);
        assert!(area.bridge_edges.is_empty());
    }

    fn component_count(roadmap: &Roadmap) -> usize {
        let mut parent: Vec<usize> = (0..roadmap.vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for e in &roadmap.edges {
            let ra = find(&mut parent, e.a as usize);
            let rb = find(&mut parent, e.b as usize);
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..roadmap.vertices.len())
            .map(|i| find(&mut parent, i))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    #[test]
    fn overlapping_sequential_submaps_merge_into_one_component() {
        // 1.2 m apart with 1.2 m-wide snapshots: heavy overlap.
        let (topology, store) = two_submap_world(1.2);
        let area = compose_local_area(&topology, &store, 1, &params()).unwrap();
        assert_eq!(area.member_submap_ids.len(), 2);
        // Dedup only removes.
        let total: usize = store.iter().map(|s| s.roadmap.vertices.len()).sum();
        assert!(area.merged_roadmap.vertices.len() <= total);
        assert_eq!(component_count(&area.merged_roadmap), 1);
    }

    #[test]
    fn disjoint_members_beyond_connect_radius_stay_separate() {
        let (topology, store) = two_submap_world(10.0);
        let area = compose_local_area(&topology, &store, 1, &params()).unwrap();
        assert!(area.bridge_edges.is_empty());
        assert_eq!(component_count(&area.merged_roadmap), 2);
    }

    #[test]
    fn compose_is_idempotent() {
        let (topology, store) = two_submap_world(1.2);
        let a = compose_local_area(&topology, &store, 1, &params()).unwrap();
        let b = compose_local_area(&topology, &store, 1, &params()).unwrap();
        let ser_a: Vec<(f64, f64)> = a
            .merged_roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        let ser_b: Vec<(f64, f64)> = b
            .merged_roadmap
            .vertices
            .iter()
            .map(|v| (v.position.x, v.position.y))
            .collect();
        assert_eq!(ser_a, ser_b);
        assert_eq!(a.merged_roadmap.edges.len(), b.merged_roadmap.edges.len());
    }

    #[test]
    fn unknown_member_id_rejected() {
        let (topology, store) = two_submap_world(1.2);
        assert!(matches!(
            compose_local_area(&topology, &store, 9, &params()),
            Err(SubmapError::UnknownSubmapId(9))
        ));
    }

    #[test]
    fn reconcile_demotes_frontier_inside_other_members_interior() {
        let (topology, mut store) = two_submap_world(1.2);
        // Mark a frontier on submap 0 well inside submap 1's lattice.
        let target = {
            let s0 = store.get(0).unwrap();
            s0.roadmap
                .vertices
                .iter()
                .find(|v| {
                    let p = s0.anchor.transform_point(&v.position);
                    (p.x - 1.2).abs() < 0.05 && p.y.abs() < 0.05
                })
                .map(|v| v.id)
                .expect("overlap vertex")
        };
        {
            let s0 = store.get_mut(0).unwrap();
            s0.roadmap.vertices[target as usize].is_frontier = true;
            s0.frontier_vertex_ids.insert(target);
        }
        let area = compose_local_area(&topology, &store, 0, &params()).unwrap();
        assert!(area.merged_frontiers.contains(&(0, target)));
        let area = reconcile_frontiers(area, &mut store).unwrap();
        assert!(!area.merged_frontiers.contains(&(0, target)));
        // Demotion persists in the store.
        assert!(!store.get(0).unwrap().roadmap.vertex(target).is_frontier);
    }

    #[test]
    fn reconcile_retains_frontier_on_shared_outer_boundary() {
        let (topology, mut store) = two_submap_world(1.2);
        // Frontier on the far edge of submap 1, outside submap 0's coverage.
        let target = {
            let s1 = store.get(1).unwrap();
            s1.roadmap
                .vertices
                .iter()
                .find(|v| {
                    let p = s1.anchor.transform_point(&v.position);
                    (p.x - 2.4).abs() < 0.05 && p.y.abs() < 0.05
                })
                .map(|v| v.id)
                .expect("far-edge vertex")
        };
        {
            let s1 = store.get_mut(1).unwrap();
            s1.roadmap.vertices[target as usize].is_frontier = true;
            s1.frontier_vertex_ids.insert(target);
        }
        let area = compose_local_area(&topology, &store, 1, &params()).unwrap();
        let area = reconcile_frontiers(area, &mut store).unwrap();
        assert!(area.merged_frontiers.contains(&(1, target)));
    }

    #[test]
    fn single_member_area_never_demotes() {
        let mut store = SubmapStore::new();
        let mut s0 = submap_at(0, 0.0, 0.0, 0.3);
        let mut l0 = local_grid_roadmap(Point::new(0.0, 0.0), 0.3, 3);
        l0.vertices[0].is_frontier = true;
        merge_local_into_submap(&mut s0, &l0, &odom(0.0, 0.0, 0.0), 0.1);
        let mut topology = GlobalTopology::new();
        topology.add_node(0);
        store.insert(s0);
        let area = compose_local_area(&topology, &store, 0, &params()).unwrap();
        let n_before = area.merged_frontiers.len();
        assert_eq!(n_before, 1);
        let area = reconcile_frontiers(area, &mut store).unwrap();
        assert_eq!(area.merged_frontiers.len(), n_before);
    }
}
