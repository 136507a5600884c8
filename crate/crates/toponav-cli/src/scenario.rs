//! Mission runners: the full submap-roadmap pipeline, the growing-grid
//! baseline, and a pure-greedy follower, all sharing one deterministic
//! simulation loop shape and one metrics schema.

use std::collections::VecDeque;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use toponav_core::baseline::BaselineGlobalMap;
use toponav_core::frontier::{annotate_roadmap, frontier_scan, FrontierScan};
use toponav_core::geom::{normalize_angle, Frame, Point, Pose2};
use toponav_core::grid::{cell_center, PointIndex};
use toponav_core::local_map::{CellState, LocalMetricMap};
use toponav_core::memory;
use toponav_core::planner::{
    plan_backtracing, plan_exploration, select_mode, FrontierRef, Plan, PlanError, PlannerMode,
    PlannerState,
};
use toponav_core::roadmap::sample_roadmap;
use toponav_core::sim::{
    detect_loop, sense, step, DriftState, MotionCommand, SenseError, World,
};
use toponav_core::submap::{
    compose_local_area, merge_local_into_submap, reconcile_frontiers, Submap, SubmapError,
    SubmapId, SubmapSpawner, SubmapStore,
};
use toponav_core::topology::{GlobalTopology, TopologyError};
use toponav_core::traversability::{compute_traversability, inflate_obstacles};

use crate::config::ScenarioConfig;
use crate::render::{render_png, RenderInputs};
use crate::snapshot::{save_json, FrameSnapshot, GridSnapshot};
use crate::store_io;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Reached,
    Timeout,
    Stuck,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Reached => 0,
            Outcome::Timeout => 2,
            Outcome::Stuck => 3,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Sense(#[from] SenseError),
    #[error(transparent)]
    Submap(#[from] SubmapError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("map integration failed: {0}")]
    Integrate(#[from] toponav_core::local_map::IntegrateError),
}

/// Per-frame metrics row. `frame_time` is wall-clock and deliberately not
/// serialized: `metrics.jsonl` must be byte-identical across runs; timing
/// goes to `timing.jsonl`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub frame_num: u64,
    pub sim_time: f64,
    pub active_memory_bytes: usize,
    pub total_memory_bytes: usize,
    pub reintegration_cell_writes: u64,
    pub mode: String,
    pub distance_to_goal: f64,
    pub collided: bool,
    #[serde(skip, default)]
    pub frame_time: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrectionEvent {
    pub frame_num: u64,
    pub pair: (SubmapId, SubmapId),
    pub chain_len: usize,
    /// Wall-clock seconds spent applying the correction.
    pub seconds: f64,
    pub reintegration_cell_writes: u64,
}

pub struct RunResult {
    pub outcome: Outcome,
    pub frames: Vec<FrameMetrics>,
    pub corrections: Vec<CorrectionEvent>,
    pub final_true_pose: Pose2,
    pub store: Option<SubmapStore>,
    pub topology: Option<GlobalTopology>,
    pub final_frame: Option<FrameSnapshot>,
    pub final_plan: Option<Plan>,
}

impl RunResult {
    pub fn total_reintegration_writes(&self) -> u64 {
        self.frames.iter().map(|f| f.reintegration_cell_writes).sum()
    }

    /// Least-squares slope (bytes/frame) of a memory series over the final
    /// half of the mission, and the series mean over that window.
    pub fn memory_slope_final_half(&self, active: bool) -> (f64, f64) {
        let series: Vec<f64> = self
            .frames
            .iter()
            .map(|f| {
                if active {
                    f.active_memory_bytes as f64
                } else {
                    f.total_memory_bytes as f64
                }
            })
            .collect();
        let start = series.len() / 2;
        let window = &series[start..];
        let n = window.len() as f64;
        if window.len() < 2 {
            return (0.0, window.first().copied().unwrap_or(0.0));
        }
        let mean_x = (n - 1.0) / 2.0;
        let mean_y: f64 = window.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, y) in window.iter().enumerate() {
            let dx = i as f64 - mean_x;
            num += dx * (y - mean_y);
            den += dx * dx;
        }
        (num / den, mean_y)
    }
}

/// Pure-pursuit step toward the first waypoint beyond the lookahead.
fn pursuit_command(pose: &Pose2, waypoints: &[Point], cfg: &ScenarioConfig) -> MotionCommand {
    let lookahead = (cfg.sample_interval * 2.0).max(cfg.v_max * cfg.dt * 3.0);
    let position = pose.position();
    let target = waypoints
        .iter()
        .find(|wp| position.dist(wp) > lookahead)
        .or(waypoints.last());
    let Some(target) = target else {
        return MotionCommand { v: 0.0, w: 0.0 };
    };
    let desired = (target.y - pose.y).atan2(target.x - pose.x);
    let err = normalize_angle(desired - pose.theta);
    let w = (2.5 * err).clamp(-cfg.w_max, cfg.w_max);
    let cone = std::f64::consts::FRAC_PI_3;
    let v = if err.abs() >= cone {
        0.0
    } else {
        cfg.v_max * (1.0 - err.abs() / cone)
    };
    MotionCommand { v, w }
}

/// Stall watchdog: Stuck once every position in the window stays within
/// `STALL_DIST` of the current one.
const STALL_WINDOW: usize = 200;
const STALL_DIST: f64 = 0.05;

struct Watchdog {
    window: VecDeque<Point>,
}

impl Watchdog {
    fn new() -> Self {
        Watchdog {
            window: VecDeque::with_capacity(STALL_WINDOW),
        }
    }

    fn stalled(&mut self, p: Point) -> bool {
        if self.window.len() == STALL_WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(p);
        self.window.len() == STALL_WINDOW && self.window.iter().all(|q| q.dist(&p) < STALL_DIST)
    }
}

/// Believed pose: the odometry pose expressed in the corrected frame via the
/// active submap's anchor chain.
fn corrected_pose(active: &Submap, odom: &Pose2) -> Pose2 {
    active
        .anchor
        .compose(&odom.relative_to(&active.creation_odom).with_frame(Frame::Corrected))
}

/// Demote stale frontier vertices sitting inside the live window: the
/// freshest map knows whether a boundary still exists there. A frontier
/// vertex of any area member that projects into the (margin-shrunk) window
/// onto observed cells, with no current frontier cell within the sample
/// interval, is cleared.
fn refresh_window_frontiers(
    store: &mut SubmapStore,
    topology: &GlobalTopology,
    active_id: SubmapId,
    map: &LocalMetricMap,
    fscan: &FrontierScan,
    cfg: &ScenarioConfig,
) -> Result<(), ScenarioError> {
    let rho = cfg.sample_interval;
    let res = cfg.local_map_resolution;
    let cells_index = PointIndex::with_points(
        rho.max(1e-6),
        fscan.frontier_cells.iter().map(|&c| cell_center(c, res)),
    );
    let mut members: Vec<SubmapId> = topology.neighbors(active_id).collect();
    members.push(active_id);
    members.sort_unstable();
    members.dedup();

    let (anchor_cur, creation_cur) = {
        let s = store.get(active_id)?;
        (s.anchor, s.creation_odom)
    };
    let center = map.center().position();
    let half = cfg.local_map_size / 2.0 - rho;

    for sid in members {
        let demote: Vec<u32> = {
            let s = store.get(sid)?;
            s.roadmap
                .vertices
                .iter()
                .filter(|v| v.is_frontier)
                .filter_map(|v| {
                    let p_corr = s.anchor.transform_point(&v.position);
                    let p_odom = creation_cur.transform_point(&anchor_cur.untransform_point(&p_corr));
                    if (p_odom.x - center.x).abs() > half || (p_odom.y - center.y).abs() > half {
                        return None;
                    }
                    let cell = map.cell_containing(&p_odom);
                    let observed = map
                        .cell(cell)
                        .map(|c| c.state != CellState::Unknown)
                        .unwrap_or(false);
                    if observed && cells_index.nearest_within(&p_odom, rho).is_none() {
                        Some(v.id)
                    } else {
                        None
                    }
                })
                .collect()
        };
        if !demote.is_empty() {
            let s = store.get_mut(sid)?;
            for vid in demote {
                s.demote_frontier(vid);
            }
        }
    }
    Ok(())
}

/// Run the full submap-roadmap mission.
pub fn run_scenario(world: &World, cfg: &ScenarioConfig) -> Result<RunResult, ScenarioError> {
    cfg.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
    let sensor = cfg.sensor_model();
    sensor
        .validate()
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    if !world.is_free_at(cfg.start.x, cfg.start.y) {
        return Err(ScenarioError::Config("start pose not in free space".into()));
    }

    let mut true_pose = Pose2::new(cfg.start.x, cfg.start.y, cfg.start.theta, Frame::GroundTruth);
    let mut odom_pose = true_pose.with_frame(Frame::Odometry);
    let mut drift = DriftState::new(cfg.drift_model());
    let goal = cfg.goal_point();

    let mut map = LocalMetricMap::new(odom_pose, cfg.local_map_size, cfg.local_map_resolution);
    let mut store = SubmapStore::new();
    let mut topology = GlobalTopology::new();
    store.insert(Submap::new(
        0,
        odom_pose.with_frame(Frame::Corrected),
        odom_pose,
        cfg.sample_interval,
    ));
    topology.add_node(0);
    let mut spawner = SubmapSpawner::new(cfg.submap_interval);
    let mut true_anchors: Vec<(SubmapId, Pose2)> = vec![(0, true_pose)];
    let mut active_id: SubmapId = 0;

    let compose = cfg.compose_params();
    let pparams = cfg.planner_params();
    let mut pstate = PlannerState::new(goal);
    let mut watchdog = Watchdog::new();

    let mut frames: Vec<FrameMetrics> = Vec::new();
    let mut corrections: Vec<CorrectionEvent> = Vec::new();
    let mut final_frame: Option<FrameSnapshot> = None;
    let mut final_plan: Option<Plan> = None;
    let mut outcome = Outcome::Timeout;

    for frame_num in 0..cfg.frame_budget {
        let t_frame = Instant::now();
        let mut reint_writes_frame = 0u64;

        // Sense and integrate at the drifted pose estimate.
        let scan = sense(world, &true_pose, &sensor)?;
        let scan_odom = scan.rebased(odom_pose);
        map.integrate_scan(&scan_odom, &odom_pose)?;
        let grid = inflate_obstacles(
            compute_traversability(&map, cfg.slope_threshold, cfg.roughness_threshold),
            cfg.robot_radius,
        );
        let roadmap = sample_roadmap(&grid, cfg.sample_interval);
        let robot_cell = map.cell_containing(&odom_pose.position());
        let fscan = frontier_scan(&grid, robot_cell).ok();
        let roadmap = match &fscan {
            Some(s) => annotate_roadmap(s, roadmap, cfg.min_frontier_cells),
            None => roadmap,
        };

        // Submap bookkeeping.
        if let Some(new_submap) = spawner.maybe_spawn_submap(&odom_pose, store.get(active_id)?) {
            let id = new_submap.id;
            store.insert(new_submap);
            topology.add_node(id);
            topology.add_sequential_edge(&store, id - 1, id)?;
            true_anchors.push((id, true_pose));
            active_id = id;
        }
        merge_local_into_submap(
            store.get_mut(active_id)?,
            &roadmap,
            &odom_pose,
            cfg.dedup_epsilon(),
        );
        if let Some(fscan) = &fscan {
            refresh_window_frontiers(&mut store, &topology, active_id, &map, fscan, cfg)?;
        }

        // Loop recognition, validation, correction.
        if let Some(cand) = detect_loop(&true_anchors, &true_pose, cfg.loop_radius) {
            if !topology.has_edge(cand, active_id)
                && topology.validate_loop(&store, cand, active_id, &compose)?
            {
                topology.add_validated_loop(&store, cand, active_id)?;
                let observed_rel = true_anchors[active_id as usize]
                    .1
                    .relative_to(&true_anchors[cand as usize].1)
                    .with_frame(Frame::Corrected);
                let writes_before = map.cell_writes();
                let t_corr = Instant::now();
                let stats = topology.apply_correction(&mut store, (cand, active_id), &observed_rel)?;
                let seconds = t_corr.elapsed().as_secs_f64();
                let delta_writes = map.cell_writes() - writes_before;
                reint_writes_frame += delta_writes;
                corrections.push(CorrectionEvent {
                    frame_num,
                    pair: (cand, active_id),
                    chain_len: stats.chain_len,
                    seconds,
                    reintegration_cell_writes: delta_writes,
                });
            }
        }

        // Compose the planning view and plan.
        let area = compose_local_area(&topology, &store, active_id, &compose)?;
        let area = reconcile_frontiers(area, &mut store)?;
        let believed = corrected_pose(store.get(active_id)?, &odom_pose);
        let mode = select_mode(&area, &goal, &pparams);
        let mut exhausted = false;
        let plan = {
            let explore = |pstate: &mut PlannerState, exhausted: &mut bool| {
                let pool: Vec<FrontierRef> = store
                    .global_frontiers()
                    .into_iter()
                    .map(|(submap_id, vertex_id, position)| FrontierRef {
                        submap_id,
                        vertex_id,
                        position,
                    })
                    .collect();
                match plan_exploration(
                    &topology, &store, &area, &pool, &believed.position(), &goal, pstate, &pparams,
                ) {
                    Ok(plan) => Some(plan),
                    Err(PlanError::NoFrontiers) => {
                        *exhausted = true;
                        None
                    }
                    Err(_) => None,
                }
            };
            match mode {
                PlannerMode::Backtracing => {
                    plan_backtracing(&area, &believed.position(), &goal, &pparams)
                        .ok()
                        .or_else(|| explore(&mut pstate, &mut exhausted))
                }
                PlannerMode::Exploration => explore(&mut pstate, &mut exhausted),
            }
        };

        let distance_to_goal = true_pose.position().dist(&goal);
        let mode_str = match &plan {
            Some(p) if p.mode == PlannerMode::Backtracing => "backtracing",
            Some(_) => "exploration",
            None => "idle",
        };

        // Execute one follower step.
        let cmd = plan
            .as_ref()
            .map(|p| pursuit_command(&believed, &p.waypoints, cfg))
            .unwrap_or(MotionCommand { v: 0.0, w: 0.0 });
        let out = step(world, &true_pose, &odom_pose, cmd, cfg.dt, &mut drift);
        spawner.on_motion(out.distance);
        true_pose = out.true_pose;
        odom_pose = out.odom_pose;

        let active_memory =
            memory::local_map_bytes(&map) + memory::local_area_bytes(&area);
        let total_memory =
            active_memory + memory::store_bytes(&store) + memory::topology_bytes(&topology);
        frames.push(FrameMetrics {
            frame_num,
            sim_time: frame_num as f64 * cfg.dt,
            active_memory_bytes: active_memory,
            total_memory_bytes: total_memory,
            reintegration_cell_writes: reint_writes_frame,
            mode: mode_str.to_string(),
            distance_to_goal,
            collided: out.collided,
            frame_time: t_frame.elapsed().as_secs_f64(),
        });

        let last_frame = FrameSnapshot {
            grid: GridSnapshot::from_grid(&grid),
            roadmap,
            plan: plan.clone(),
            robot: (believed.x, believed.y, believed.theta),
        };
        final_frame = Some(last_frame);
        final_plan = plan;

        if true_pose.position().dist(&goal) <= cfg.attach_radius() {
            outcome = Outcome::Reached;
            break;
        }
        if exhausted && final_plan.is_none() {
            outcome = Outcome::Stuck;
            break;
        }
        if watchdog.stalled(true_pose.position()) {
            outcome = Outcome::Stuck;
            break;
        }
    }

    Ok(RunResult {
        outcome,
        frames,
        corrections,
        final_true_pose: true_pose,
        store: Some(store),
        topology: Some(topology),
        final_frame,
        final_plan,
    })
}

/// Run the growing-global-grid baseline on the same mission shape.
pub fn run_baseline(world: &World, cfg: &ScenarioConfig) -> Result<RunResult, ScenarioError> {
    cfg.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
    let sensor = cfg.sensor_model();
    sensor
        .validate()
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    if !world.is_free_at(cfg.start.x, cfg.start.y) {
        return Err(ScenarioError::Config("start pose not in free space".into()));
    }

    let mut true_pose = Pose2::new(cfg.start.x, cfg.start.y, cfg.start.theta, Frame::GroundTruth);
    let mut odom_pose = true_pose.with_frame(Frame::Odometry);
    let mut drift = DriftState::new(cfg.drift_model());
    let goal = cfg.goal_point();

    let mut global_map = BaselineGlobalMap::new(cfg.local_map_resolution);
    let mut spawner_distance = 0.0f64;
    // (anchor seq, history index, odom pose, true pose)
    let mut anchors: Vec<(u32, usize, Pose2, Pose2)> = Vec::new();
    let mut corrected_pairs: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    let mut watchdog = Watchdog::new();

    let mut frames = Vec::new();
    let mut corrections = Vec::new();
    let mut outcome = Outcome::Timeout;

    for frame_num in 0..cfg.frame_budget {
        let t_frame = Instant::now();
        let mut reint_writes_frame = 0u64;

        let scan = sense(world, &true_pose, &sensor)?;
        let scan_odom = scan.rebased(odom_pose);
        global_map.integrate(scan_odom, odom_pose);

        if anchors.is_empty() || spawner_distance >= cfg.submap_interval {
            spawner_distance = 0.0;
            let seq = anchors.len() as u32;
            anchors.push((seq, global_map.history_len() - 1, odom_pose, true_pose));
        }

        let history: Vec<(u32, Pose2)> = anchors.iter().map(|&(id, _, _, t)| (id, t)).collect();
        if let Some(cand) = detect_loop(&history, &true_pose, cfg.loop_radius) {
            let cur = anchors.last().unwrap().0;
            if !corrected_pairs.contains(&(cand, cur)) {
                corrected_pairs.insert((cand, cur));
                let (_, idx_a, odom_a, true_a) = anchors[cand as usize];
                let (_, idx_b, odom_b, true_b) = anchors[cur as usize];
                let current_rel = odom_b.relative_to(&odom_a);
                let observed_rel = true_b
                    .relative_to(&true_a)
                    .with_frame(Frame::Odometry);
                let error = current_rel.inverse().compose(&observed_rel);
                let t_corr = Instant::now();
                let replayed = global_map.correct_and_reintegrate(idx_a, idx_b, &error);
                let seconds = t_corr.elapsed().as_secs_f64();
                // The live pose estimate shifts with the corrected chain.
                odom_pose = odom_pose.compose(&error);
                reint_writes_frame += replayed;
                corrections.push(CorrectionEvent {
                    frame_num,
                    pair: (cand, cur),
                    chain_len: (cur - cand) as usize,
                    seconds,
                    reintegration_cell_writes: replayed,
                });
            }
        }

        let plan_waypoints = global_map.plan_grid_path(&odom_pose.position(), &goal, cfg.robot_radius);
        let distance_to_goal = true_pose.position().dist(&goal);

        let cmd = plan_waypoints
            .as_ref()
            .map(|wps| pursuit_command(&odom_pose, wps, cfg))
            .unwrap_or(MotionCommand { v: 0.0, w: 0.0 });
        let out = step(world, &true_pose, &odom_pose, cmd, cfg.dt, &mut drift);
        spawner_distance += out.distance;
        true_pose = out.true_pose;
        odom_pose = out.odom_pose;

        let bytes = global_map.memory_bytes();
        frames.push(FrameMetrics {
            frame_num,
            sim_time: frame_num as f64 * cfg.dt,
            active_memory_bytes: bytes,
            total_memory_bytes: bytes,
            reintegration_cell_writes: reint_writes_frame,
            mode: if plan_waypoints.is_some() {
                "grid_astar".to_string()
            } else {
                "idle".to_string()
            },
            distance_to_goal,
            collided: out.collided,
            frame_time: t_frame.elapsed().as_secs_f64(),
        });

        if true_pose.position().dist(&goal) <= cfg.attach_radius() {
            outcome = Outcome::Reached;
            break;
        }
        if watchdog.stalled(true_pose.position()) {
            outcome = Outcome::Stuck;
            break;
        }
    }

    Ok(RunResult {
        outcome,
        frames,
        corrections,
        final_true_pose: true_pose,
        store: None,
        topology: None,
        final_frame: None,
        final_plan: None,
    })
}

/// Pure-greedy follower: drives straight at the goal with no map and no
/// planner. The comparison stooge for trap worlds.
pub fn run_greedy(world: &World, cfg: &ScenarioConfig) -> Result<RunResult, ScenarioError> {
    cfg.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
    let mut true_pose = Pose2::new(cfg.start.x, cfg.start.y, cfg.start.theta, Frame::GroundTruth);
    let mut odom_pose = true_pose.with_frame(Frame::Odometry);
    let mut drift = DriftState::new(cfg.drift_model());
    let goal = cfg.goal_point();
    let mut watchdog = Watchdog::new();
    let mut frames = Vec::new();
    let mut outcome = Outcome::Timeout;

    for frame_num in 0..cfg.frame_budget {
        let t_frame = Instant::now();
        let cmd = pursuit_command(&true_pose.with_frame(Frame::Corrected), &[goal], cfg);
        let out = step(world, &true_pose, &odom_pose, cmd, cfg.dt, &mut drift);
        true_pose = out.true_pose;
        odom_pose = out.odom_pose;
        let distance_to_goal = true_pose.position().dist(&goal);
        frames.push(FrameMetrics {
            frame_num,
            sim_time: frame_num as f64 * cfg.dt,
            active_memory_bytes: 0,
            total_memory_bytes: 0,
            reintegration_cell_writes: 0,
            mode: "greedy".to_string(),
            distance_to_goal,
            collided: out.collided,
            frame_time: t_frame.elapsed().as_secs_f64(),
        });
        if distance_to_goal <= cfg.attach_radius() {
            outcome = Outcome::Reached;
            break;
        }
        if watchdog.stalled(true_pose.position()) {
            outcome = Outcome::Stuck;
            break;
        }
    }

    Ok(RunResult {
        outcome,
        frames,
        corrections: Vec::new(),
        final_true_pose: true_pose,
        store: None,
        topology: None,
        final_frame: None,
        final_plan: None,
    })
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    outcome: Outcome,
    frames: usize,
    final_distance_to_goal: f64,
    corrections: usize,
    total_reintegration_cell_writes: u64,
    loop_edges: usize,
    final_true_pose: (f64, f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    submaps: Option<usize>,
    mode_frames: &'a std::collections::BTreeMap<String, usize>,
}

/// Write the full artifact set for a run into `out_dir`:
/// `metrics.jsonl`, `timing.jsonl`, `summary.json`, the submap store under
/// `map/`, `topology.json`, `frame.json`, `plan.json`, and
/// `snapshot_final.png`.
pub fn write_artifacts(
    out_dir: &Path,
    world: &World,
    cfg: &ScenarioConfig,
    result: &RunResult,
) -> anyhow::Result<()> {
    fs::create_dir_all(out_dir)?;

    let mut metrics = fs::File::create(out_dir.join("metrics.jsonl"))?;
    for frame in &result.frames {
        serde_json::to_writer(&mut metrics, frame)?;
        metrics.write_all(b"\n")?;
    }
    let mut timing = fs::File::create(out_dir.join("timing.jsonl"))?;
    for frame in &result.frames {
        writeln!(
            timing,
            "{}",
            serde_json::json!({"frame_num": frame.frame_num, "frame_time_s": frame.frame_time})
        )?;
    }

    let mut mode_frames: std::collections::BTreeMap<String, usize> = Default::default();
    for f in &result.frames {
        *mode_frames.entry(f.mode.clone()).or_default() += 1;
    }
    let summary = SummaryFile {
        outcome: result.outcome,
        frames: result.frames.len(),
        final_distance_to_goal: result
            .frames
            .last()
            .map(|f| f.distance_to_goal)
            .unwrap_or(f64::NAN),
        corrections: result.corrections.len(),
        total_reintegration_cell_writes: result.total_reintegration_writes(),
        loop_edges: result
            .topology
            .as_ref()
            .map(|t| {
                t.edges()
                    .iter()
                    .filter(|e| e.kind == toponav_core::topology::EdgeKind::ValidatedLoop)
                    .count()
            })
            .unwrap_or(0),
        final_true_pose: (
            result.final_true_pose.x,
            result.final_true_pose.y,
            result.final_true_pose.theta,
        ),
        submaps: result.store.as_ref().map(|s| s.len()),
        mode_frames: &mode_frames,
    };
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    fs::write(
        out_dir.join("corrections.json"),
        serde_json::to_string(&result.corrections)?,
    )?;

    if let (Some(store), Some(topology)) = (&result.store, &result.topology) {
        store_io::save_store(out_dir, store)?;
        store_io::save_topology(out_dir, topology, store)?;
    }
    if let Some(frame) = &result.final_frame {
        save_json(&out_dir.join("frame.json"), frame)?;
    }
    if let Some(plan) = &result.final_plan {
        save_json(&out_dir.join("plan.json"), plan)?;
    }

    let png = render_png(
        &RenderInputs {
            world,
            store: result.store.as_ref(),
            topology: result.topology.as_ref(),
            frame: result.final_frame.as_ref(),
            plan: result.final_plan.as_ref(),
        },
        cfg.snapshot_scale,
    );
    fs::write(out_dir.join("snapshot_final.png"), png)?;
    Ok(())
}
