//! Wavefront frontier detection.
//!
//! A BFS from the robot cell walks the open cells of the window (traversable
//! or inflated — inflation must not hide boundaries the robot can observe).
//! A visited cell 4-adjacent to an in-window Unknown cell is a frontier cell;
//! frontier cells cluster by 8-connectivity, and each large-enough cluster
//! marks its nearest roadmap vertex as a frontier.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::geom::Point;
use crate::grid::{cell_center, CellIndex};
use crate::local_map::{CellState, LocalMetricMap};
use crate::roadmap::{FrontierOrigin, Roadmap};
use crate::traversability::TraversabilityGrid;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FrontierError {
    #[error("robot cell {0:?} is not traversable")]
    RobotCellNotTraversable(CellIndex),
}

#[derive(Clone, Debug)]
pub struct FrontierCluster {
    pub cells: Vec<CellIndex>,
    pub centroid: Point,
}

/// Result of the wavefront pass: reachable frontier cells and their
/// 8-connected clusters, in deterministic scan order.
#[derive(Clone, Debug, Default)]
pub struct FrontierScan {
    pub frontier_cells: Vec<CellIndex>,
    pub clusters: Vec<FrontierCluster>,
}

const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const EIGHT: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// BFS wavefront pass over the open cells of `grid` from `robot_cell`.
pub fn frontier_scan(
    grid: &TraversabilityGrid,
    robot_cell: CellIndex,
) -> Result<FrontierScan, FrontierError> {
    if !grid.is_open(robot_cell) {
        return Err(FrontierError::RobotCellNotTraversable(robot_cell));
    }
    let n = grid.cells_per_side();
    let mut visited = alloc::vec![false; n * n];
    let idx = |cell: CellIndex| grid.local_index(cell).map(|(x, y)| y * n + x);

    let mut queue = VecDeque::new();
    visited[idx(robot_cell).expect("robot cell in window")] = true;
    queue.push_back(robot_cell);
    let mut frontier_cells = Vec::new();
    while let Some(cell) = queue.pop_front() {
        let mut is_frontier = false;
        for (dx, dy) in FOUR {
            let nb = (cell.0 + dx, cell.1 + dy);
            match grid.cell(nb) {
                Some(c) if c.state == CellState::Unknown => is_frontier = true,
                Some(_) if grid.is_open(nb) => {
                    let i = idx(nb).expect("neighbor in window");
                    if !visited[i] {
                        visited[i] = true;
                        queue.push_back(nb);
                    }
                }
                _ => {}
            }
        }
        if is_frontier {
            frontier_cells.push(cell);
        }
    }
    frontier_cells.sort_unstable();

    // Cluster by 8-connectivity.
    let mut in_frontier = alloc::vec![false; n * n];
    for &c in &frontier_cells {
        in_frontier[idx(c).expect("frontier cell in window")] = true;
    }
    let mut clustered = alloc::vec![false; n * n];
    let mut clusters = Vec::new();
    for &seed in &frontier_cells {
        let si = idx(seed).expect("seed in window");
        if clustered[si] {
            continue;
        }
        clustered[si] = true;
        let mut cells = alloc::vec![seed];
        let mut queue = VecDeque::new();
        queue.push_back(seed);
        while let Some(cell) = queue.pop_front() {
            for (dx, dy) in EIGHT {
                let nb = (cell.0 + dx, cell.1 + dy);
                if let Some(i) = idx(nb) {
                    if in_frontier[i] && !clustered[i] {
                        clustered[i] = true;
                        cells.push(nb);
                        queue.push_back(nb);
                    }
                }
            }
        }
        cells.sort_unstable();
        let res = grid.resolution();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for c in &cells {
            let p = cell_center(*c, res);
            cx += p.x;
            cy += p.y;
        }
        let count = cells.len() as f64;
        clusters.push(FrontierCluster {
            cells,
            centroid: Point::new(cx / count, cy / count),
        });
    }
    Ok(FrontierScan {
        frontier_cells,
        clusters,
    })
}

/// Mark `is_frontier` on the roadmap vertex nearest to each cluster of at
/// least `min_frontier_cells` cells (ties: lowest vertex id).
pub fn annotate_roadmap(
    scan: &FrontierScan,
    mut roadmap: Roadmap,
    min_frontier_cells: usize,
) -> Roadmap {
    for cluster in &scan.clusters {
        if cluster.cells.len() < min_frontier_cells {
            continue;
        }
        let mut best: Option<(f64, u32)> = None;
        for v in &roadmap.vertices {
            let d = v.position.dist_sq(&cluster.centroid);
            match best {
                Some((bd, _)) if bd <= d => {}
                _ => best = Some((d, v.id)),
            }
        }
        if let Some((_, id)) = best {
            let v = &mut roadmap.vertices[id as usize];
            v.is_frontier = true;
            v.frontier_origin = FrontierOrigin::Local;
        }
    }
    roadmap
}

/// Wavefront frontier detection over the live window: BFS, cluster, annotate.
pub fn detect_frontiers(
    map: &LocalMetricMap,
    grid: &TraversabilityGrid,
    roadmap: Roadmap,
    robot_cell: CellIndex,
    min_frontier_cells: usize,
) -> Result<Roadmap, FrontierError> {
    debug_assert_eq!(map.origin_cell(), grid.origin_cell());
    debug_assert_eq!(map.cells_per_side(), grid.cells_per_side());
    let scan = frontier_scan(grid, robot_cell)?;
    Ok(annotate_roadmap(&scan, roadmap, min_frontier_cells))
}
