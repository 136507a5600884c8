//! Debug snapshots: the traversability window as run-length-encoded JSON
//! plus the annotated roadmap and plan, for offline inspection and the
//! renderer.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toponav_core::local_map::CellState;
use toponav_core::planner::Plan;
use toponav_core::roadmap::Roadmap;
use toponav_core::traversability::TraversabilityGrid;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

/// Per-cell code in the RLE stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum CellCode {
    Unknown = 0,
    Traversable = 1,
    Untraversable = 2,
    Obstacle = 3,
    Inflated = 4,
}

/// RLE snapshot of a traversability window: `runs` holds `(count, code)`
/// pairs over row-major cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSnapshot {
    pub origin_cell: (i64, i64),
    pub cells_per_side: usize,
    pub resolution: f64,
    pub runs: Vec<(u32, CellCode)>,
}

impl GridSnapshot {
    pub fn from_grid(grid: &TraversabilityGrid) -> Self {
        let n = grid.cells_per_side();
        let mut runs: Vec<(u32, CellCode)> = Vec::new();
        for y in 0..n {
            for x in 0..n {
                let c = grid.cell_at_local(x, y);
                let code = if c.inflated {
                    CellCode::Inflated
                } else if c.traversable {
                    CellCode::Traversable
                } else {
                    match c.state {
                        CellState::Unknown => CellCode::Unknown,
                        CellState::Obstacle => CellCode::Obstacle,
                        CellState::Free => CellCode::Untraversable,
                    }
                };
                match runs.last_mut() {
                    Some((count, last)) if *last == code => *count += 1,
                    _ => runs.push((1, code)),
                }
            }
        }
        GridSnapshot {
            origin_cell: grid.origin_cell(),
            cells_per_side: n,
            resolution: grid.resolution(),
            runs,
        }
    }

    /// Expand the RLE stream back into row-major cell codes.
    pub fn expand(&self) -> Vec<CellCode> {
        let mut cells = Vec::with_capacity(self.cells_per_side * self.cells_per_side);
        for &(count, code) in &self.runs {
            for _ in 0..count {
                cells.push(code);
            }
        }
        cells
    }
}

/// Everything the offline renderer needs about one frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameSnapshot {
    pub grid: GridSnapshot,
    pub roadmap: Roadmap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Plan>,
    pub robot: (f64, f64, f64),
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SnapshotError> {
    let json = serde_json::to_string(value).expect("snapshot serializes");
    fs::write(path, json).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, SnapshotError> {
    let text = fs::read_to_string(path).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| SnapshotError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use toponav_core::geom::{Frame, Pose2};
    use toponav_core::local_map::{LocalMetricMap, MapCell};
    use toponav_core::traversability::compute_traversability;

    #[test]
    fn rle_round_trip_preserves_cells() {
        let pose = Pose2::new(1.05, 1.05, 0.0, Frame::Odometry);
        let map = LocalMetricMap::from_cells(pose, 2.0, 0.1, |cell| {
            let state = match (cell.0 + 2 * cell.1) % 5 {
                0 => CellState::Unknown,
                1 | 2 => CellState::Free,
                _ => CellState::Obstacle,
            };
            MapCell::observed(state, &[0.0])
        });
        let grid = compute_traversability(&map, 0.3, 0.01);
        let snapshot = GridSnapshot::from_grid(&grid);
        let cells = snapshot.expand();
        assert_eq!(cells.len(), grid.cell_count());
        let total: u32 = snapshot.runs.iter().map(|(c, _)| c).sum();
        assert_eq!(total as usize, grid.cell_count());
        // Spot-check alignment.
        let n = grid.cells_per_side();
        for y in (0..n).step_by(3) {
            for x in (0..n).step_by(3) {
                let want = grid.cell_at_local(x, y);
                let got = cells[y * n + x];
                match got {
                    CellCode::Unknown => assert_eq!(want.state, CellState::Unknown),
                    CellCode::Obstacle => assert_eq!(want.state, CellState::Obstacle),
                    CellCode::Traversable => assert!(want.traversable),
                    CellCode::Untraversable | CellCode::Inflated => {}
                }
            }
        }
        // Canonical JSON round-trip.
        let json = serde_json::to_string(&snapshot).unwrap();
        let back: GridSnapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
