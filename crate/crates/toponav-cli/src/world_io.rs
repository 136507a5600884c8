//! World file formats.
//!
//! ASCII grid: first line `resolution <meters>`, then one text row per grid
//! row, top row first (`#` obstacle, `.` free). JSON: explicit dimensions,
//! cell array (`0` free / `1` obstacle, row-major from the bottom row), and
//! an optional elevation array of the same length.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toponav_core::sim::{Cell, World, WorldError};

#[derive(Debug, thiserror::Error)]
pub enum WorldFileError {
    #[error("cannot read world file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error("invalid world in {path}: {source}")]
    Invalid { path: PathBuf, source: WorldError },
}

#[derive(Serialize, Deserialize)]
struct WorldJson {
    width_cells: usize,
    height_cells: usize,
    resolution: f64,
    /// Row-major from the bottom row; 0 = free, 1 = obstacle.
    cells: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    elevation: Option<Vec<f64>>,
}

fn parse_ascii(path: &Path, text: &str) -> Result<World, WorldFileError> {
    let parse = |reason: &str| WorldFileError::Parse {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse("empty file"))?;
    let resolution = header
        .strip_prefix("resolution ")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(|| parse("first line must be `resolution <meters>`"))?;
    let rows: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
    if rows.is_empty() {
        return Err(parse("no grid rows"));
    }
    let width = rows[0].chars().count();
    let height = rows.len();
    let mut cells = vec![Cell::Free; width * height];
    for (i, row) in rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(parse(&format!(
                "ragged row {}: {} cells, expected {}",
                i + 2,
                row.chars().count(),
                width
            )));
        }
        // First text row is the top of the map.
        let y = height - 1 - i;
        for (x, ch) in row.chars().enumerate() {
            cells[y * width + x] = match ch {
                '#' => Cell::Obstacle,
                '.' => Cell::Free,
                other => return Err(parse(&format!("unknown cell char {other:?}"))),
            };
        }
    }
    World::new(width, height, resolution, cells, None).map_err(|source| WorldFileError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

pub fn world_to_ascii(world: &World) -> String {
    let mut out = format!("resolution {}\n", world.resolution());
    for y in (0..world.height_cells()).rev() {
        for x in 0..world.width_cells() {
            out.push(match world.cells()[y * world.width_cells() + x] {
                Cell::Obstacle => '#',
                Cell::Free => '.',
            });
        }
        out.push('\n');
    }
    out
}

pub fn world_to_json(world: &World) -> String {
    let json = WorldJson {
        width_cells: world.width_cells(),
        height_cells: world.height_cells(),
        resolution: world.resolution(),
        cells: world
            .cells()
            .iter()
            .map(|c| if *c == Cell::Obstacle { 1 } else { 0 })
            .collect(),
        elevation: world.elevation().map(|e| e.to_vec()),
    };
    serde_json::to_string(&json).expect("world serializes")
}

fn parse_json(path: &Path, text: &str) -> Result<World, WorldFileError> {
    let json: WorldJson = serde_json::from_str(text).map_err(|e| WorldFileError::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let cells = json
        .cells
        .iter()
        .map(|&v| if v == 0 { Cell::Free } else { Cell::Obstacle })
        .collect();
    World::new(
        json.width_cells,
        json.height_cells,
        json.resolution,
        cells,
        json.elevation,
    )
    .map_err(|source| WorldFileError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

/// Load a world file, dispatching on extension (`.json` vs ASCII).
pub fn load_world(path: &Path) -> Result<World, WorldFileError> {
    let text = fs::read_to_string(path).map_err(|source| WorldFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(path, &text)
    } else {
        parse_ascii(path, &text)
    }
}

pub fn save_world(path: &Path, world: &World) -> std::io::Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        world_to_json(world)
    } else {
        world_to_ascii(world)
    };
    fs::write(path, text)
}
