//! Sparse roadmap over traversable space.
//!
//! Vertices are sampled on a uniform square lattice anchored at the window
//! center; edges connect lattice 8-neighbors whose straight segment crosses
//! only traversable cells. Frontier status is an attribute of vertices.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::grid::{traverse_segment, PointIndex};
use crate::mathx;
use crate::traversability::TraversabilityGrid;

/// Which layer a frontier attribute was last refreshed from: `Local` while
/// the vertex sits inside the live metric window, `Incremental` once it only
/// survives in stored submap content.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontierOrigin {
    #[default]
    Local,
    Incremental,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RoadmapVertex {
    pub id: u32,
    pub position: Point,
    pub is_frontier: bool,
    pub frontier_origin: FrontierOrigin,
}

/// Undirected edge; `length` is the Euclidean distance between endpoints.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RoadmapEdge {
    pub a: u32,
    pub b: u32,
    pub length: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Roadmap {
    pub vertices: Vec<RoadmapVertex>,
    pub edges: Vec<RoadmapEdge>,
    pub sample_interval: f64,
}

impl Roadmap {
    pub fn new(sample_interval: f64) -> Self {
        Roadmap {
            vertices: Vec::new(),
            edges: Vec::new(),
            sample_interval,
        }
    }

    pub fn vertex(&self, id: u32) -> &RoadmapVertex {
        &self.vertices[id as usize]
    }

    pub fn frontier_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices
            .iter()
            .filter(|v| v.is_frontier)
            .map(|v| v.id)
    }

    /// Spatial index over vertex positions (bucket size = sample interval).
    pub fn position_index(&self) -> PointIndex {
        PointIndex::with_points(
            self.sample_interval.max(1e-6),
            self.vertices.iter().map(|v| v.position),
        )
    }

    /// Adjacency list; entry `i` holds `(neighbor, edge length)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(u32, f64)>> {
        let mut adj = alloc::vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.a as usize].push((e.b, e.length));
            adj[e.b as usize].push((e.a, e.length));
        }
        adj
    }
}

/// Is every cell crossed by the segment `a -> b` traversable? Corner grazes
/// are checked too, so diagonal corner-cutting between obstacle cells fails.
pub fn segment_traversable(grid: &TraversabilityGrid, a: Point, b: Point) -> bool {
    let mut ok = true;
    traverse_segment(a, b, grid.resolution(), |rc| {
        if grid.is_traversable(rc.cell) {
            true
        } else {
            ok = false;
            false
        }
    });
    ok
}

/// Sample the uniform roadmap of a traversability window.
///
/// Lattice points of pitch `sample_interval` are anchored at the window's
/// center cell center; points on traversable cells become vertices, and
/// lattice 8-neighbors with a fully traversable straight segment become
/// edges.
pub fn sample_roadmap(grid: &TraversabilityGrid, sample_interval: f64) -> Roadmap {
    assert!(
        sample_interval >= grid.resolution(),
        "sample_interval below grid resolution"
    );
    let n = grid.cells_per_side() as i64;
    let res = grid.resolution();
    let center_cell = (
        grid.origin_cell().0 + n / 2,
        grid.origin_cell().1 + n / 2,
    );
    let anchor = Point::new(
        (center_cell.0 as f64 + 0.5) * res,
        (center_cell.1 as f64 + 0.5) * res,
    );
    let ((min_x, min_y), (max_x, max_y)) = grid.bounds();

    let lattice_range = |anchor_c: f64, lo: f64, hi: f64| -> (i64, i64) {
        let k_min = mathx::floor((lo - anchor_c) / sample_interval) as i64;
        let k_max = mathx::floor((hi - anchor_c) / sample_interval) as i64;
        (k_min, k_max)
    };
    let (i_min, i_max) = lattice_range(anchor.x, min_x, max_x);
    let (j_min, j_max) = lattice_range(anchor.y, min_y, max_y);

    let mut roadmap = Roadmap::new(sample_interval);
    let cols = (i_max - i_min + 1) as usize;
    let rows = (j_max - j_min + 1) as usize;
    let mut ids = alloc::vec![u32::MAX; cols * rows];
    let slot = |i: i64, j: i64| (j - j_min) as usize * cols + (i - i_min) as usize;

    for j in j_min..=j_max {
        for i in i_min..=i_max {
            let p = Point::new(
                anchor.x + i as f64 * sample_interval,
                anchor.y + j as f64 * sample_interval,
            );
            if p.x < min_x || p.x >= max_x || p.y < min_y || p.y >= max_y {
                continue;
            }
            let cell = crate::grid::cell_of(p.x, p.y, res);
            if !grid.is_traversable(cell) {
                continue;
            }
            let id = roadmap.vertices.len() as u32;
            ids[slot(i, j)] = id;
            roadmap.vertices.push(RoadmapVertex {
                id,
                position: p,
                is_frontier: false,
                frontier_origin: FrontierOrigin::Local,
            });
        }
    }

    // Forward half of the 8-neighborhood so each edge is built once.
    const NEIGHBORS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
    for j in j_min..=j_max {
        for i in i_min..=i_max {
            let a = ids[slot(i, j)];
            if a == u32::MAX {
                continue;
            }
            for (di, dj) in NEIGHBORS {
                let (ni, nj) = (i + di, j + dj);
                if ni < i_min || ni > i_max || nj < j_min || nj > j_max {
                    continue;
                }
                let b = ids[slot(ni, nj)];
                if b == u32::MAX {
                    continue;
                }
                let pa = roadmap.vertices[a as usize].position;
                let pb = roadmap.vertices[b as usize].position;
                if segment_traversable(grid, pa, pb) {
                    roadmap.edges.push(RoadmapEdge {
                        a,
                        b,
                        length: pa.dist(&pb),
                    });
                }
            }
        }
    }
    roadmap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Frame, Pose2};
    use crate::local_map::{CellState, LocalMetricMap, MapCell};
    use crate::traversability::compute_traversability;

    fn grid_from<F: Fn((i64, i64)) -> CellState>(side: f64, res: f64, f: F) -> TraversabilityGrid {
        let pose = Pose2::new(
            side / 2.0 + res / 2.0,
            side / 2.0 + res / 2.0,
            0.0,
            Frame::Odometry,
        );
        let map = LocalMetricMap::from_cells(pose, side, res, |cell| {
            MapCell::observed(f(cell), &[0.0])
        });
        compute_traversability(&map, 0.3, 0.01)
    }

    #[test]
    fn untraversable_grid_yields_empty_roadmap() {
        let grid = grid_from(2.0, 0.1, |_| CellState::Obstacle);
        let roadmap = sample_roadmap(&grid, 0.3);
        assert!(roadmap.vertices.is_empty());
        assert!(roadmap.edges.is_empty());
    }

    #[test]
    fn fully_traversable_five_meter_map_has_289_vertices() {
        let grid = grid_from(5.0, 0.1, |_| CellState::Free);
        let roadmap = sample_roadmap(&grid, 0.3);
        assert_eq!(roadmap.vertices.len(), 17 * 17);
        // Interior vertices have degree 8.
        let adj = roadmap.adjacency();
        let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
        let interior = roadmap
            .vertices
            .iter()
            .filter(|v| {
                let c = v.position;
                (c.x - 2.55).abs() < 2.0 && (c.y - 2.55).abs() < 2.0
            })
            .count();
        assert!(interior > 0);
        for v in &roadmap.vertices {
            if (v.position.x - 2.55).abs() < 2.0 && (v.position.y - 2.55).abs() < 2.0 {
                assert_eq!(degrees[v.id as usize], 8, "vertex {:?}", v.position);
            }
        }
    }

    /// Union-find over edge endpoints.
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
    fn bisecting_wall_splits_roadmap_into_two_components() {
        // Vertical wall through the middle of the window.
        let grid = grid_from(5.0, 0.1, |cell| {
            if cell.0 == 25 {
                CellState::Obstacle
            } else {
                CellState::Free
            }
        });
        let roadmap = sample_roadmap(&grid, 0.3);
        assert!(!roadmap.vertices.is_empty());
        assert_eq!(component_count(&roadmap), 2);
    }

    #[test]
    fn edge_lengths_match_euclidean_distance() {
        let grid = grid_from(3.0, 0.1, |_| CellState::Free);
        let roadmap = sample_roadmap(&grid, 0.4);
        for e in &roadmap.edges {
            let pa = roadmap.vertices[e.a as usize].position;
            let pb = roadmap.vertices[e.b as usize].position;
            assert!((e.length - pa.dist(&pb)).abs() < 1e-9);
        }
    }

    #[test]
    fn edge_segments_avoid_untraversable_cells_under_supersampling() {
        // Scattered obstacles; supersample each edge at res/2.
        let grid = grid_from(4.0, 0.1, |cell| {
            if (cell.0 * 13 + cell.1 * 29) % 17 == 0 {
                CellState::Obstacle
            } else {
                CellState::Free
            }
        });
        let roadmap = sample_roadmap(&grid, 0.3);
        assert!(!roadmap.edges.is_empty());
        for e in &roadmap.edges {
            let pa = roadmap.vertices[e.a as usize].position;
            let pb = roadmap.vertices[e.b as usize].position;
            let steps = (e.length / 0.05).ceil() as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let p = Point::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y));
                let cell = crate::grid::cell_of(p.x, p.y, 0.1);
                assert!(
                    grid.is_traversable(cell),
                    "edge {:?}-{:?} crosses non-traversable cell {:?}",
                    pa,
                    pb,
                    cell
                );
            }
        }
    }
}
