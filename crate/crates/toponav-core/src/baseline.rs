//! Baseline mapper for benchmark comparison: one growing world-frame
//! occupancy grid plus the full scan history. A pose correction rewrites the
//! stored odometry chain and re-integrates every scan from scratch — the
//! costly behavior the submap representation exists to avoid.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Pose2};
use crate::grid::{cell_of, distance_transform_sq, traverse_ray, CellIndex};
use crate::local_map::CellState;
use crate::mathx;
use crate::memory::{BEAM_BYTES, MAP_CELL_BYTES, POSE_BYTES};
use crate::sim::RangeScan;

#[derive(Copy, Clone)]
struct GridHeapEntry {
    priority: f64,
    node: u32,
}

impl PartialEq for GridHeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority && self.node == other.node
    }
}
impl Eq for GridHeapEntry {}
impl Ord for GridHeapEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.node.cmp(&self.node))
    }
}
impl PartialOrd for GridHeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Growing global occupancy grid with scan history.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineGlobalMap {
    resolution: f64,
    origin: CellIndex,
    width: usize,
    height: usize,
    cells: Vec<CellState>,
    history: Vec<(Pose2, RangeScan)>,
    cell_writes: u64,
    reintegration_writes: u64,
}

const GROW_CHUNK: i64 = 32;

impl BaselineGlobalMap {
    pub fn new(resolution: f64) -> Self {
        assert!(resolution > 0.0);
        BaselineGlobalMap {
            resolution,
            origin: (0, 0),
            width: 0,
            height: 0,
            cells: Vec::new(),
            history: Vec::new(),
            cell_writes: 0,
            reintegration_writes: 0,
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn cell_writes(&self) -> u64 {
        self.cell_writes
    }

    pub fn reintegration_writes(&self) -> u64 {
        self.reintegration_writes
    }

    pub fn poses(&self) -> impl Iterator<Item = &Pose2> {
        self.history.iter().map(|(p, _)| p)
    }

    pub fn bounds(&self) -> (CellIndex, CellIndex) {
        (
            self.origin,
            (
                self.origin.0 + self.width as i64,
                self.origin.1 + self.height as i64,
            ),
        )
    }

    pub fn state(&self, cell: CellIndex) -> CellState {
        let x = cell.0 - self.origin.0;
        let y = cell.1 - self.origin.1;
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return CellState::Unknown;
        }
        self.cells[y as usize * self.width + x as usize]
    }

    fn set_state(&mut self, cell: CellIndex, state: CellState, counter_is_reintegration: bool) {
        self.grow_to_include(cell);
        let x = (cell.0 - self.origin.0) as usize;
        let y = (cell.1 - self.origin.1) as usize;
        self.cells[y * self.width + x] = state;
        if counter_is_reintegration {
            self.reintegration_writes += 1;
        } else {
            self.cell_writes += 1;
        }
    }

    /// Monotone bounds growth: cell count never decreases over a mission.
    fn grow_to_include(&mut self, cell: CellIndex) {
        let (ox, oy) = self.origin;
        let in_x = cell.0 >= ox && cell.0 < ox + self.width as i64;
        let in_y = cell.1 >= oy && cell.1 < oy + self.height as i64;
        if in_x && in_y {
            return;
        }
        let new_min_x = ox.min(cell.0 - GROW_CHUNK);
        let new_min_y = oy.min(cell.1 - GROW_CHUNK);
        let new_max_x = (ox + self.width as i64).max(cell.0 + GROW_CHUNK + 1);
        let new_max_y = (oy + self.height as i64).max(cell.1 + GROW_CHUNK + 1);
        let new_w = (new_max_x - new_min_x) as usize;
        let new_h = (new_max_y - new_min_y) as usize;
        let mut fresh = alloc::vec![CellState::Unknown; new_w * new_h];
        for y in 0..self.height {
            let src = y * self.width;
            let dst = (y as i64 + oy - new_min_y) as usize * new_w
                + (ox - new_min_x) as usize;
            fresh[dst..dst + self.width].copy_from_slice(&self.cells[src..src + self.width]);
        }
        self.cells = fresh;
        self.origin = (new_min_x, new_min_y);
        self.width = new_w;
        self.height = new_h;
    }

    fn rasterize(&mut self, pose: &Pose2, scan: &RangeScan, reintegration: bool) {
        let origin = pose.position();
        for beam in &scan.beams {
            let angle = pose.theta + beam.bearing;
            let dir = (mathx::cos(angle), mathx::sin(angle));
            let mut touched: Vec<CellIndex> = Vec::new();
            traverse_ray(origin, dir, beam.range, self.resolution, |rc| {
                let mid = 0.5 * (rc.t_entry + rc.t_exit);
                if mid < beam.range {
                    touched.push(rc.cell);
                }
                true
            });
            for cell in touched {
                self.set_state(cell, CellState::Free, reintegration);
            }
            if beam.hit {
                let eps = self.resolution * 1e-3;
                let p = Point::new(
                    origin.x + (beam.range + eps) * dir.0,
                    origin.y + (beam.range + eps) * dir.1,
                );
                self.set_state(cell_of(p.x, p.y, self.resolution), CellState::Obstacle, reintegration);
            }
        }
    }

    /// Append a scan at its odometry pose and integrate it.
    pub fn integrate(&mut self, scan: RangeScan, odom_pose: Pose2) {
        self.rasterize(&odom_pose, &scan, false);
        self.history.push((odom_pose, scan));
    }

    /// Apply a loop correction: distribute `error` linearly over the pose
    /// chain between two history indices (full error after `to_idx`), then
    /// rebuild the grid by replaying the whole history. Returns the number
    /// of cell writes the replay cost.
    pub fn correct_and_reintegrate(
        &mut self,
        from_idx: usize,
        to_idx: usize,
        error: &Pose2,
    ) -> u64 {
        assert!(from_idx <= to_idx && to_idx < self.history.len());
        let span = (to_idx - from_idx).max(1) as f64;
        for i in from_idx..self.history.len() {
            let f = ((i - from_idx) as f64 / span).min(1.0);
            let frac = Pose2::new(error.x * f, error.y * f, error.theta * f, error.frame);
            let (pose, _) = &mut self.history[i];
            *pose = pose.compose(&frac.with_frame(pose.frame));
        }
        // Full rebuild: reset cells, replay every stored scan.
        let before = self.reintegration_writes;
        self.cells.fill(CellState::Unknown);
        let history = core::mem::take(&mut self.history);
        for (pose, scan) in &history {
            self.rasterize(pose, scan, true);
        }
        self.history = history;
        self.reintegration_writes - before
    }

    /// Analytic memory: grid cells plus stored history (beams and poses).
    pub fn memory_bytes(&self) -> usize {
        let beams: usize = self.history.iter().map(|(_, s)| s.beams.len()).sum();
        self.cells.len() * MAP_CELL_BYTES + beams * BEAM_BYTES + self.history.len() * POSE_BYTES
    }

    /// Optimistic grid A*: unknown cells are plannable, obstacles inflate by
    /// `robot_radius`. Returns world-frame waypoints (cell centers).
    /// Neighbors expand inline; this runs every frame on a growing grid.
    pub fn plan_grid_path(
        &self,
        start: &Point,
        goal: &Point,
        robot_radius: f64,
    ) -> Option<Vec<Point>> {
        if self.width == 0 || self.height == 0 {
            return None;
        }
        let w = self.width;
        let h = self.height;
        let dt = distance_transform_sq(w, h, |x, y| {
            self.cells[y * w + x] == CellState::Obstacle
        });
        let r_cells = robot_radius / self.resolution;
        let r_sq = r_cells * r_cells + 1e-9;
        let blocked = |x: usize, y: usize| dt[y * w + x] <= r_sq;

        let to_local = |p: &Point| -> Option<(usize, usize)> {
            let c = cell_of(p.x, p.y, self.resolution);
            let x = c.0 - self.origin.0;
            let y = c.1 - self.origin.1;
            if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                None
            } else {
                Some((x as usize, y as usize))
            }
        };
        let start_c = to_local(start)?;
        let goal_c = to_local(goal)?;
        if blocked(goal_c.0, goal_c.1) || blocked(start_c.0, start_c.1) {
            return None;
        }

        const DIRS: [(i64, i64, f64); 8] = [
            (1, 0, 1.0),
            (-1, 0, 1.0),
            (0, 1, 1.0),
            (0, -1, 1.0),
            (1, 1, core::f64::consts::SQRT_2),
            (1, -1, core::f64::consts::SQRT_2),
            (-1, 1, core::f64::consts::SQRT_2),
            (-1, -1, core::f64::consts::SQRT_2),
        ];
        let idx = |x: usize, y: usize| y * w + x;
        let heuristic = |i: usize| {
            let x = (i % w) as f64;
            let y = (i / w) as f64;
            mathx::hypot(x - goal_c.0 as f64, y - goal_c.1 as f64)
        };
        let start_i = idx(start_c.0, start_c.1);
        let goal_i = idx(goal_c.0, goal_c.1);
        let mut g = alloc::vec![f64::INFINITY; w * h];
        let mut parent = alloc::vec![u32::MAX; w * h];
        let mut closed = alloc::vec![false; w * h];
        let mut heap: alloc::collections::BinaryHeap<GridHeapEntry> =
            alloc::collections::BinaryHeap::new();
        g[start_i] = 0.0;
        heap.push(GridHeapEntry {
            priority: heuristic(start_i),
            node: start_i as u32,
        });
        while let Some(GridHeapEntry { node, .. }) = heap.pop() {
            let node = node as usize;
            if closed[node] {
                continue;
            }
            closed[node] = true;
            if node == goal_i {
                break;
            }
            let (x, y) = (node % w, node / w);
            for (dx, dy, cost) in DIRS {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if blocked(nx, ny) {
                    continue;
                }
                let next = idx(nx, ny);
                let cand = g[node] + cost;
                if cand < g[next] {
                    g[next] = cand;
                    parent[next] = node as u32;
                    heap.push(GridHeapEntry {
                        priority: cand + heuristic(next),
                        node: next as u32,
                    });
                }
            }
        }
        if !closed[goal_i] {
            return None;
        }
        let mut cells = alloc::vec![goal_i];
        let mut cur = goal_i;
        while cur != start_i {
            cur = parent[cur] as usize;
            cells.push(cur);
        }
        cells.reverse();
        let path: Vec<Point> = cells
            .iter()
            .step_by(3)
            .chain(core::iter::once(&goal_i))
            .map(|&v| {
                let x = (v % w) as i64 + self.origin.0;
                let y = (v / w) as i64 + self.origin.1;
                crate::grid::cell_center((x, y), self.resolution)
            })
            .collect();
        Some(path)
    }
}
