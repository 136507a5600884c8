//! The simulated environment: a dense closed grid of free/obstacle cells with
//! optional per-cell terrain elevation.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::grid::CellIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Obstacle,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WorldError {
    #[error("cell array length {got} does not match {width}x{height}")]
    CellCount { width: usize, height: usize, got: usize },
    #[error("elevation array length {got} does not match {want} cells")]
    ElevationCount { want: usize, got: usize },
    #[error("resolution must be positive, got {0}")]
    BadResolution(f64),
    #[error("world boundary is not closed at cell ({0}, {1})")]
    OpenBoundary(i64, i64),
    #[error("world must be at least 3x3 cells, got {0}x{1}")]
    TooSmall(usize, usize),
}

/// A closed rectangular grid world. Boundary cells are always obstacles, so
/// every ray cast from a free interior cell terminates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct World {
    width_cells: usize,
    height_cells: usize,
    resolution: f64,
    cells: Vec<Cell>,
    elevation: Option<Vec<f64>>,
}

impl World {
    pub fn new(
        width_cells: usize,
        height_cells: usize,
        resolution: f64,
        cells: Vec<Cell>,
        elevation: Option<Vec<f64>>,
    ) -> Result<Self, WorldError> {
        if width_cells < 3 || height_cells < 3 {
            return Err(WorldError::TooSmall(width_cells, height_cells));
        }
        if !(resolution > 0.0) {
            return Err(WorldError::BadResolution(resolution));
        }
        if cells.len() != width_cells * height_cells {
            return Err(WorldError::CellCount {
                width: width_cells,
                height: height_cells,
                got: cells.len(),
            });
        }
        if let Some(elev) = &elevation {
            if elev.len() != cells.len() {
                return Err(WorldError::ElevationCount {
                    want: cells.len(),
                    got: elev.len(),
                });
            }
        }
        let world = World {
            width_cells,
            height_cells,
            resolution,
            cells,
            elevation,
        };
        for x in 0..width_cells as i64 {
            for y in [0, height_cells as i64 - 1] {
                if world.cell(x, y) != Cell::Obstacle {
                    return Err(WorldError::OpenBoundary(x, y));
                }
            }
        }
        for y in 0..height_cells as i64 {
            for x in [0, width_cells as i64 - 1] {
                if world.cell(x, y) != Cell::Obstacle {
                    return Err(WorldError::OpenBoundary(x, y));
                }
            }
        }
        Ok(world)
    }

    pub fn width_cells(&self) -> usize {
        self.width_cells
    }

    pub fn height_cells(&self) -> usize {
        self.height_cells
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width_m(&self) -> f64 {
        self.width_cells as f64 * self.resolution
    }

    pub fn height_m(&self) -> f64 {
        self.height_cells as f64 * self.resolution
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn elevation(&self) -> Option<&[f64]> {
        self.elevation.as_deref()
    }

    /// Cell state at lattice coordinates; everything outside the grid reads
    /// as obstacle (the world is closed).
    pub fn cell(&self, x: i64, y: i64) -> Cell {
        if x < 0 || y < 0 || x >= self.width_cells as i64 || y >= self.height_cells as i64 {
            return Cell::Obstacle;
        }
        self.cells[y as usize * self.width_cells + x as usize]
    }

    /// Terrain height of a cell; zero when the world carries no elevation.
    pub fn elevation_at(&self, cell: CellIndex) -> f64 {
        let (x, y) = cell;
        if x < 0 || y < 0 || x >= self.width_cells as i64 || y >= self.height_cells as i64 {
            return 0.0;
        }
        match &self.elevation {
            Some(e) => e[y as usize * self.width_cells + x as usize],
            None => 0.0,
        }
    }

    pub fn is_free_at(&self, x: f64, y: f64) -> bool {
        let c = crate::grid::cell_of(x, y, self.resolution);
        self.cell(c.0, c.1) == Cell::Free
    }
}
