//! Robot-centric fixed-size metric window.
//!
//! The map is a square grid of constant cell count in the odometry frame,
//! aligned to the world-resolution lattice. Integrating a scan first recenters
//! the window on the robot (an integer-cell shift that preserves overlapping
//! content exactly and discards cells that leave the window — they were
//! already merged into the submap roadmap), then rasterizes each beam.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{Frame, Point, Pose2};
use crate::grid::{cell_of, traverse_ray, CellIndex};
use crate::mathx;
use crate::sim::RangeScan;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    #[default]
    Unknown,
    Free,
    Obstacle,
}

/// One metric cell: occupancy state plus streaming height statistics.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct MapCell {
    pub state: CellState,
    pub height_mean: f64,
    height_m2: f64,
    pub observation_count: u32,
    height_samples: u32,
}

impl MapCell {
    /// A cell observed in `state` with the given height samples streamed in.
    pub fn observed(state: CellState, heights: &[f64]) -> MapCell {
        let mut cell = MapCell {
            state,
            observation_count: if state == CellState::Unknown {
                0
            } else {
                heights.len().max(1) as u32
            },
            ..MapCell::default()
        };
        if state != CellState::Unknown {
            for &h in heights {
                cell.observe_height(h);
            }
        }
        cell
    }

    /// Population variance of the observed heights (zero below two samples).
    pub fn height_var(&self) -> f64 {
        if self.height_samples < 2 {
            0.0
        } else {
            self.height_m2 / self.height_samples as f64
        }
    }

    fn observe_height(&mut self, h: f64) {
        self.height_samples += 1;
        let delta = h - self.height_mean;
        self.height_mean += delta / self.height_samples as f64;
        self.height_m2 += delta * (h - self.height_mean);
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IntegrateError {
    #[error("scan/map frame mismatch: scan {scan:?}, pose {pose:?}, map {map:?}")]
    FrameMismatch {
        scan: Frame,
        pose: Frame,
        map: Frame,
    },
}

/// Fixed-size robot-centric occupancy + elevation window (odometry frame).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalMetricMap {
    center: Pose2,
    side_length: f64,
    resolution: f64,
    cells_per_side: usize,
    /// Lattice cell (odometry frame) of the window's (0, 0) cell.
    origin_cell: CellIndex,
    cells: Vec<MapCell>,
    /// Monotone count of metric cell writes, for reintegration accounting.
    cell_writes: u64,
}

impl LocalMetricMap {
    pub fn new(center: Pose2, side_length: f64, resolution: f64) -> Self {
        assert!(side_length > 0.0 && resolution > 0.0);
        let cells_per_side = mathx::round(side_length / resolution) as usize;
        let robot = cell_of(center.x, center.y, resolution);
        let half = (cells_per_side / 2) as i64;
        LocalMetricMap {
            center,
            side_length,
            resolution,
            cells_per_side,
            origin_cell: (robot.0 - half, robot.1 - half),
            cells: alloc::vec![MapCell::default(); cells_per_side * cells_per_side],
            cell_writes: 0,
        }
    }

    /// Build a window with explicit cell contents (map import, fixtures).
    /// `fill` receives each cell's odometry-frame lattice index.
    pub fn from_cells<F>(center: Pose2, side_length: f64, resolution: f64, mut fill: F) -> Self
    where
        F: FnMut(CellIndex) -> MapCell,
    {
        let mut map = LocalMetricMap::new(center, side_length, resolution);
        let n = map.cells_per_side;
        for y in 0..n {
            for x in 0..n {
                let cell = map.global_cell(x, y);
                map.cells[y * n + x] = fill(cell);
            }
        }
        map
    }

    pub fn center(&self) -> &Pose2 {
        &self.center
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn origin_cell(&self) -> CellIndex {
        self.origin_cell
    }

    pub fn cell_writes(&self) -> u64 {
        self.cell_writes
    }

    /// Window-local column/row of an odometry-frame lattice cell.
    pub fn local_index(&self, cell: CellIndex) -> Option<(usize, usize)> {
        let lx = cell.0 - self.origin_cell.0;
        let ly = cell.1 - self.origin_cell.1;
        let n = self.cells_per_side as i64;
        if lx < 0 || ly < 0 || lx >= n || ly >= n {
            None
        } else {
            Some((lx as usize, ly as usize))
        }
    }

    pub fn cell(&self, cell: CellIndex) -> Option<&MapCell> {
        self.local_index(cell)
            .map(|(x, y)| &self.cells[y * self.cells_per_side + x])
    }

    pub fn cell_at_local(&self, x: usize, y: usize) -> &MapCell {
        &self.cells[y * self.cells_per_side + x]
    }

    /// Odometry-frame lattice cell of window-local coordinates.
    pub fn global_cell(&self, x: usize, y: usize) -> CellIndex {
        (self.origin_cell.0 + x as i64, self.origin_cell.1 + y as i64)
    }

    pub fn cell_containing(&self, p: &Point) -> CellIndex {
        cell_of(p.x, p.y, self.resolution)
    }

    fn cell_mut(&mut self, cell: CellIndex) -> Option<&mut MapCell> {
        let n = self.cells_per_side;
        self.local_index(cell).map(move |(x, y)| &mut self.cells[y * n + x])
    }

    /// Shift the window so it is centered on `new_center`. Overlapping cells
    /// keep their contents exactly; cells entering the window start Unknown.
    fn recenter(&mut self, new_center: Pose2) {
        self.center = new_center;
        let robot = cell_of(new_center.x, new_center.y, self.resolution);
        let half = (self.cells_per_side / 2) as i64;
        let new_origin = (robot.0 - half, robot.1 - half);
        if new_origin == self.origin_cell {
            return;
        }
        let shift = (
            new_origin.0 - self.origin_cell.0,
            new_origin.1 - self.origin_cell.1,
        );
        let n = self.cells_per_side;
        let mut fresh = alloc::vec![MapCell::default(); n * n];
        for y in 0..n as i64 {
            for x in 0..n as i64 {
                let ox = x + shift.0;
                let oy = y + shift.1;
                if ox >= 0 && oy >= 0 && ox < n as i64 && oy < n as i64 {
                    fresh[y as usize * n + x as usize] =
                        self.cells[oy as usize * n + ox as usize];
                }
            }
        }
        self.cells = fresh;
        self.origin_cell = new_origin;
    }

    /// Recenter on `odom_pose` and rasterize every beam of `scan`:
    /// cells whose crossing midpoint lies before the hit are marked Free, the
    /// hit cell Obstacle (latest observation wins), and the beam's ground
    /// samples stream into the height statistics of observed cells.
    pub fn integrate_scan(
        &mut self,
        scan: &RangeScan,
        odom_pose: &Pose2,
    ) -> Result<(), IntegrateError> {
        if scan.origin.frame != self.center.frame || odom_pose.frame != self.center.frame {
            return Err(IntegrateError::FrameMismatch {
                scan: scan.origin.frame,
                pose: odom_pose.frame,
                map: self.center.frame,
            });
        }
        self.recenter(*odom_pose);
        let origin = odom_pose.position();
        let res = self.resolution;
        for beam in &scan.beams {
            let angle = odom_pose.theta + beam.bearing;
            let dir = (mathx::cos(angle), mathx::sin(angle));
            let mut touched: Vec<CellIndex> = Vec::new();
            traverse_ray(origin, dir, beam.range, res, |rc| {
                let mid = 0.5 * (rc.t_entry + rc.t_exit);
                if mid < beam.range {
                    touched.push(rc.cell);
                }
                true
            });
            for cell in touched {
                if let Some(c) = self.cell_mut(cell) {
                    c.state = CellState::Free;
                    c.observation_count += 1;
                    self.cell_writes += 1;
                }
            }
            if beam.hit {
                let eps = res * 1e-3;
                let hit_point = Point::new(
                    origin.x + (beam.range + eps) * dir.0,
                    origin.y + (beam.range + eps) * dir.1,
                );
                let cell = cell_of(hit_point.x, hit_point.y, res);
                if let Some(c) = self.cell_mut(cell) {
                    c.state = CellState::Obstacle;
                    c.observation_count += 1;
                    self.cell_writes += 1;
                }
            }
            for &(dist, height) in &beam.ground {
                if dist > beam.range + res * 1e-3 {
                    continue;
                }
                let p = Point::new(origin.x + dist * dir.0, origin.y + dist * dir.1);
                let cell = cell_of(p.x, p.y, res);
                if let Some(c) = self.cell_mut(cell) {
                    if c.state != CellState::Unknown {
                        c.observe_height(height);
                    }
                }
            }
        }
        Ok(())
    }
}
