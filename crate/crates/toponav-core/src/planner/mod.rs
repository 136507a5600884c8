//! Two-mode hierarchical planner.
//!
//! Backtracing: the goal attaches to the known merged roadmap, so planning is
//! plain A*. Exploration: the goal lies in unknown space; a global waypoint
//! frontier is chosen by the weighted utility
//! `U(F) = w_d * dist(F, goal) + w_l * dist(F, last_waypoint)` (the shift
//! term damps waypoint oscillation), a topology-level A* routes toward its
//! owning submap, and within the local area the plan degrades into
//! backtracing toward the frontier leading that way.

pub mod search;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::grid::PointIndex;
use crate::submap::{segment_covered, LocalArea, SubmapId, SubmapStore};
use crate::topology::GlobalTopology;

pub use search::{astar, dijkstra_all, path_from_parents, SearchResult};

/// Weights of the frontier utility. Defaults follow the evaluated setup:
/// distance weight 0.8, shift weight 0.2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w_d: f64,
    pub w_l: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { w_d: 0.8, w_l: 0.2 }
    }
}

impl CostWeights {
    pub fn validate(&self) -> bool {
        self.w_d >= 0.0 && self.w_l >= 0.0 && self.w_d + self.w_l > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlannerMode {
    Backtracing,
    Exploration,
}

/// Mission-scoped planner state. `last_waypoint` is set iff at least one
/// exploration waypoint has been chosen this mission.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PlannerState {
    pub last_waypoint: Option<Point>,
    pub mode: PlannerMode,
    pub goal: Point,
}

impl PlannerState {
    pub fn new(goal: Point) -> Self {
        PlannerState {
            last_waypoint: None,
            mode: PlannerMode::Exploration,
            goal,
        }
    }
}

/// A frontier candidate with its owning submap, for global selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierRef {
    pub submap_id: SubmapId,
    pub vertex_id: u32,
    pub position: Point,
}

/// An executable plan over the merged local-area roadmap. Waypoints after the
/// first follow existing roadmap/bridge edges, except a final goal
/// attachment segment in backtracing mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Plan {
    pub mode: PlannerMode,
    pub waypoints: Vec<Point>,
    /// Merged-roadmap vertex ids along the path.
    pub graph_path: Vec<u32>,
    /// Sum of edge lengths along `graph_path`.
    pub cost: f64,
    /// Topology-level route (submap ids); single entry when the target lies
    /// in the current local area.
    pub topo_path: Vec<SubmapId>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlanError {
    #[error("no path through the merged roadmap")]
    NoPath,
    #[error("no frontiers remain anywhere in the map")]
    NoFrontiers,
    #[error("global topology is disconnected at submap {0}")]
    TopologyDisconnected(SubmapId),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Goal/start attachment radius onto the merged roadmap.
    pub attach_radius: f64,
    /// Coverage-disk radius for attachment segment checks.
    pub coverage_radius: f64,
    pub weights: CostWeights,
}

/// Eq.-style frontier utility: weighted goal distance plus shift cost from
/// the previously chosen waypoint (zero before the first selection).
pub fn frontier_utility(
    f: &Point,
    goal: &Point,
    state: &PlannerState,
    w: &CostWeights,
) -> f64 {
    let shift = match &state.last_waypoint {
        Some(last) => last.dist(f),
        None => 0.0,
    };
    w.w_d * f.dist(goal) + w.w_l * shift
}

/// Choose the frontier minimizing [`frontier_utility`]; ties break on the
/// lowest `(submap_id, vertex_id)`. Updates `state.last_waypoint`.
pub fn select_waypoint(
    frontiers: &[FrontierRef],
    goal: &Point,
    state: &mut PlannerState,
    w: &CostWeights,
) -> Result<FrontierRef, PlanError> {
    let best = frontiers
        .iter()
        .min_by(|a, b| {
            frontier_utility(&a.position, goal, state, w)
                .total_cmp(&frontier_utility(&b.position, goal, state, w))
                .then_with(|| (a.submap_id, a.vertex_id).cmp(&(b.submap_id, b.vertex_id)))
        })
        .copied()
        .ok_or(PlanError::NoFrontiers)?;
    state.last_waypoint = Some(best.position);
    Ok(best)
}

fn coverage_index(area: &LocalArea, coverage_radius: f64) -> PointIndex {
    PointIndex::with_points(
        coverage_radius.max(1e-6),
        area.merged_roadmap.vertices.iter().map(|v| v.position),
    )
}

/// Vertices within `radius` of `p` whose straight attachment segment stays
/// in coverage, nearest first.
fn attach_candidates(
    area: &LocalArea,
    coverage: &PointIndex,
    p: &Point,
    radius: f64,
    coverage_radius: f64,
) -> Vec<u32> {
    let index = area.merged_roadmap.position_index();
    let mut ids = index.within(p, radius);
    ids.sort_by(|&a, &b| {
        area.merged_roadmap.vertices[a]
            .position
            .dist_sq(p)
            .total_cmp(&area.merged_roadmap.vertices[b].position.dist_sq(p))
            .then_with(|| a.cmp(&b))
    });
    ids.into_iter()
        .filter(|&i| {
            segment_covered(
                coverage,
                p,
                &area.merged_roadmap.vertices[i].position,
                coverage_radius,
            )
        })
        .map(|i| i as u32)
        .collect()
}

/// Attach the robot position leniently: prefer a covered segment within the
/// attach radius, then within four radii, then the nearest vertex outright
/// (the robot is always embedded in its own roadmap; numeric edge cases must
/// not strand it).
fn attach_start(area: &LocalArea, coverage: &PointIndex, p: &Point, params: &PlannerParams) -> Option<u32> {
    for radius in [params.attach_radius, params.attach_radius * 4.0] {
        if let Some(&id) =
            attach_candidates(area, coverage, p, radius, params.coverage_radius).first()
        {
            return Some(id);
        }
    }
    area.merged_roadmap
        .vertices
        .iter()
        .min_by(|a, b| {
            a.position
                .dist_sq(p)
                .total_cmp(&b.position.dist_sq(p))
                .then_with(|| a.id.cmp(&b.id))
        })
        .map(|v| v.id)
}

/// Backtracing iff the goal attaches to the merged roadmap: some vertex
/// within the attach radius whose straight segment to the goal is covered.
pub fn select_mode(area: &LocalArea, goal: &Point, params: &PlannerParams) -> PlannerMode {
    let coverage = coverage_index(area, params.coverage_radius);
    if attach_candidates(area, &coverage, goal, params.attach_radius, params.coverage_radius)
        .is_empty()
    {
        PlannerMode::Exploration
    } else {
        PlannerMode::Backtracing
    }
}

fn plan_on_area(
    area: &LocalArea,
    start_vertex: u32,
    goal_vertex: u32,
    mode: PlannerMode,
    goal_attachment: Option<Point>,
    topo_path: Vec<SubmapId>,
) -> Result<Plan, PlanError> {
    let adjacency = area.merged_roadmap.adjacency();
    let goal_pos = area.merged_roadmap.vertices[goal_vertex as usize].position;
    let result = astar(&adjacency, start_vertex, goal_vertex, |v| {
        area.merged_roadmap.vertices[v as usize].position.dist(&goal_pos)
    })
    .ok_or(PlanError::NoPath)?;
    let mut waypoints: Vec<Point> = result
        .path
        .iter()
        .map(|&v| area.merged_roadmap.vertices[v as usize].position)
        .collect();
    if let Some(goal) = goal_attachment {
        if waypoints.last().map(|p| p.dist(&goal) > 1e-9).unwrap_or(true) {
            waypoints.push(goal);
        }
    }
    Ok(Plan {
        mode,
        waypoints,
        graph_path: result.path,
        cost: result.cost,
        topo_path,
    })
}

/// A* over the merged local-area roadmap from `start` to an attached `goal`.
pub fn plan_backtracing(
    area: &LocalArea,
    start: &Point,
    goal: &Point,
    params: &PlannerParams,
) -> Result<Plan, PlanError> {
    let coverage = coverage_index(area, params.coverage_radius);
    let start_vertex = attach_start(area, &coverage, start, params).ok_or(PlanError::NoPath)?;
    let goal_vertex = *attach_candidates(
        area,
        &coverage,
        goal,
        params.attach_radius,
        params.coverage_radius,
    )
    .first()
    .ok_or(PlanError::NoPath)?;
    plan_on_area(
        area,
        start_vertex,
        goal_vertex,
        PlannerMode::Backtracing,
        Some(*goal),
        alloc::vec![area.current_id],
    )
}

/// Hierarchical exploration step.
///
/// 1. Pick the global waypoint frontier by utility over all known frontiers.
/// 2. If it lives in the local area, plan straight to it.
/// 3. Otherwise A* over the topology toward its owning submap; the first
///    node outside the local area becomes the next submap target, and the
///    local plan routes to the retained area frontier that best leads there
///    (graph distance from the robot plus straight-line pull toward the
///    target anchor).
pub fn plan_exploration(
    topology: &GlobalTopology,
    store: &SubmapStore,
    area: &LocalArea,
    frontier_index: &[FrontierRef],
    start: &Point,
    goal: &Point,
    state: &mut PlannerState,
    params: &PlannerParams,
) -> Result<Plan, PlanError> {
    let best = select_waypoint(frontier_index, goal, state, &params.weights)?;
    let coverage = coverage_index(area, params.coverage_radius);
    let start_vertex = attach_start(area, &coverage, start, params).ok_or(PlanError::NoPath)?;

    // Degenerate hierarchy: the chosen frontier is in the local area.
    if area.merged_frontiers.contains(&(best.submap_id, best.vertex_id)) {
        if let Some(goal_vertex) = area.merged_id_of(best.submap_id, best.vertex_id) {
            match plan_on_area(
                area,
                start_vertex,
                goal_vertex,
                PlannerMode::Exploration,
                None,
                alloc::vec![area.current_id],
            ) {
                Ok(plan) => return Ok(plan),
                Err(PlanError::NoPath) => {} // locally unreachable: go hierarchical
                Err(e) => return Err(e),
            }
        }
    }

    let topo_adjacency = dense_topology_adjacency(topology);
    let topo_result = astar(&topo_adjacency, area.current_id, best.submap_id, |_| 0.0)
        .ok_or(PlanError::TopologyDisconnected(best.submap_id))?;
    let target_submap = topo_result
        .path
        .iter()
        .copied()
        .find(|id| !area.member_submap_ids.contains(id))
        .unwrap_or(best.submap_id);
    let target_anchor = store
        .get(target_submap)
        .map_err(|_| PlanError::TopologyDisconnected(target_submap))?
        .anchor
        .position();

    let adjacency = area.merged_roadmap.adjacency();
    let (dist, parents) = dijkstra_all(&adjacency, start_vertex);

    // Retained area frontier that best leads toward the target submap.
    let mut best_local: Option<(f64, (SubmapId, u32), u32)> = None;
    for &(sid, vid) in &area.merged_frontiers {
        let Some(mid) = area.merged_id_of(sid, vid) else {
            continue;
        };
        let d = dist[mid as usize];
        if !d.is_finite() {
            continue;
        }
        let score = d + area.merged_roadmap.vertices[mid as usize]
            .position
            .dist(&target_anchor);
        let key = (score, (sid, vid), mid);
        match &best_local {
            Some((s, k, _)) if (*s, *k) <= (score, (sid, vid)) => {}
            _ => best_local = Some(key),
        }
    }
    // No usable frontier in the area: head for the vertex nearest the
    // target submap's anchor instead.
    let goal_vertex = match best_local {
        Some((_, _, mid)) => mid,
        None => area
            .merged_roadmap
            .vertices
            .iter()
            .filter(|v| dist[v.id as usize].is_finite())
            .min_by(|a, b| {
                a.position
                    .dist_sq(&target_anchor)
                    .total_cmp(&b.position.dist_sq(&target_anchor))
                    .then_with(|| a.id.cmp(&b.id))
            })
            .map(|v| v.id)
            .ok_or(PlanError::NoPath)?,
    };

    let path = path_from_parents(&parents, start_vertex, goal_vertex).ok_or(PlanError::NoPath)?;
    let cost = dist[goal_vertex as usize];
    let waypoints = path
        .iter()
        .map(|&v| area.merged_roadmap.vertices[v as usize].position)
        .collect();
    Ok(Plan {
        mode: PlannerMode::Exploration,
        waypoints,
        graph_path: path,
        cost,
        topo_path: topo_result.path.iter().map(|&v| v as SubmapId).collect(),
    })
}

/// Topology adjacency as dense arrays (submap ids are dense by construction).
pub fn dense_topology_adjacency(topology: &GlobalTopology) -> Vec<Vec<(u32, f64)>> {
    let n = topology
        .nodes()
        .iter()
        .map(|&id| id as usize + 1)
        .max()
        .unwrap_or(0);
    let mut adj = alloc::vec![Vec::new(); n];
    for e in topology.edges() {
        adj[e.a as usize].push((e.b, e.length));
        adj[e.b as usize].push((e.a, e.length));
    }
    adj
}
