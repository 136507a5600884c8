//! Traversability from terrain statistics, plus obstacle inflation.
//!
//! A cell is traversable when it is observed Free, its height-gradient
//! magnitude (slope) is at or below the slope threshold, and its height
//! variance (roughness) is at or below the roughness threshold. Inflation
//! then removes every traversable cell within the robot radius of an
//! obstacle or unknown cell — unknown space inflates like an obstacle.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::grid::{distance_transform_sq, CellIndex};
use crate::local_map::{CellState, LocalMetricMap};
use crate::mathx;

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct TravCell {
    pub state: CellState,
    pub slope: f64,
    pub roughness: f64,
    pub traversable: bool,
    pub inflated: bool,
}

/// Per-cell traversability over the same window geometry as the source map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraversabilityGrid {
    resolution: f64,
    cells_per_side: usize,
    origin_cell: CellIndex,
    cells: Vec<TravCell>,
}

impl TraversabilityGrid {
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn origin_cell(&self) -> CellIndex {
        self.origin_cell
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

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

    pub fn global_cell(&self, x: usize, y: usize) -> CellIndex {
        (self.origin_cell.0 + x as i64, self.origin_cell.1 + y as i64)
    }

    pub fn cell_at_local(&self, x: usize, y: usize) -> &TravCell {
        &self.cells[y * self.cells_per_side + x]
    }

    pub fn cell(&self, cell: CellIndex) -> Option<&TravCell> {
        self.local_index(cell)
            .map(|(x, y)| &self.cells[y * self.cells_per_side + x])
    }

    pub fn is_traversable(&self, cell: CellIndex) -> bool {
        self.cell(cell).is_some_and(|c| c.traversable)
    }

    /// Traversable before inflation: the domain frontier detection walks.
    pub fn is_open(&self, cell: CellIndex) -> bool {
        self.cell(cell).is_some_and(|c| c.traversable || c.inflated)
    }

    /// Bounds of the window in frame coordinates, `(min, max)` per axis.
    pub fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let min = (
            self.origin_cell.0 as f64 * self.resolution,
            self.origin_cell.1 as f64 * self.resolution,
        );
        let n = self.cells_per_side as f64 * self.resolution;
        (min, (min.0 + n, min.1 + n))
    }
}

/// Slope and roughness per cell from the map's height statistics.
///
/// Slope is the central-difference gradient magnitude of the height mean,
/// falling back to one-sided differences at the window border; roughness is
/// the height variance.
pub fn compute_traversability(
    map: &LocalMetricMap,
    slope_threshold: f64,
    roughness_threshold: f64,
) -> TraversabilityGrid {
    assert!(slope_threshold > 0.0 && roughness_threshold > 0.0);
    let n = map.cells_per_side();
    let res = map.resolution();
    let mut cells = alloc::vec![TravCell::default(); n * n];
    let height = |x: usize, y: usize| map.cell_at_local(x, y).height_mean;
    for y in 0..n {
        for x in 0..n {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(n - 1);
            let ym = y.saturating_sub(1);
            let yp = (y + 1).min(n - 1);
            let gx = (height(xp, y) - height(xm, y)) / ((xp - xm) as f64 * res);
            let gy = (height(x, yp) - height(x, ym)) / ((yp - ym) as f64 * res);
            let c = map.cell_at_local(x, y);
            let slope = mathx::hypot(gx, gy);
            let roughness = c.height_var();
            cells[y * n + x] = TravCell {
                state: c.state,
                slope,
                roughness,
                traversable: c.state == CellState::Free
                    && slope <= slope_threshold
                    && roughness <= roughness_threshold,
                inflated: false,
            };
        }
    }
    TraversabilityGrid {
        resolution: res,
        cells_per_side: n,
        origin_cell: map.origin_cell(),
        cells,
    }
}

/// Mark every traversable cell whose center lies within `robot_radius`
/// (center-to-center, exact Euclidean distance transform) of an obstacle or
/// unknown cell as inflated, clearing its traversable flag.
pub fn inflate_obstacles(mut grid: TraversabilityGrid, robot_radius: f64) -> TraversabilityGrid {
    assert!(robot_radius >= 0.0);
    let n = grid.cells_per_side;
    let dt = distance_transform_sq(n, n, |x, y| {
        grid.cells[y * n + x].state != CellState::Free
    });
    let r_cells_sq = {
        let r = robot_radius / grid.resolution;
        r * r + 1e-9
    };
    for (cell, &d2) in grid.cells.iter_mut().zip(dt.iter()) {
        if cell.traversable && d2 <= r_cells_sq {
            cell.inflated = true;
            cell.traversable = false;
        }
    }
    grid
}
