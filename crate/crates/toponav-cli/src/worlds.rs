//! Built-in benchmark worlds. All generators produce closed worlds and are
//! deterministic; the checked-in world files under `worlds/` were written by
//! these functions.

use toponav_core::sim::{Cell, World};

struct Builder {
    w: usize,
    h: usize,
    res: f64,
    cells: Vec<Cell>,
}

impl Builder {
    fn open(width_m: f64, height_m: f64, res: f64) -> Self {
        let w = (width_m / res).round() as usize;
        let h = (height_m / res).round() as usize;
        let mut b = Builder {
            w,
            h,
            res,
            cells: vec![Cell::Free; w * h],
        };
        b.rect_fill(0.0, 0.0, width_m, res, Cell::Obstacle);
        b.rect_fill(0.0, height_m - res, width_m, height_m, Cell::Obstacle);
        b.rect_fill(0.0, 0.0, res, height_m, Cell::Obstacle);
        b.rect_fill(width_m - res, 0.0, width_m, height_m, Cell::Obstacle);
        b
    }

    /// Fill cells whose centers lie in `[x0, x1) x [y0, y1)` (meters).
    fn rect_fill(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, value: Cell) {
        for y in 0..self.h {
            for x in 0..self.w {
                let cx = (x as f64 + 0.5) * self.res;
                let cy = (y as f64 + 0.5) * self.res;
                if cx >= x0 && cx < x1 && cy >= y0 && cy < y1 {
                    self.cells[y * self.w + x] = value;
                }
            }
        }
    }

    fn build(self) -> World {
        World::new(self.w, self.h, self.res, self.cells, None).expect("generator worlds are valid")
    }
}

/// Empty closed room.
pub fn open_room(width_m: f64, height_m: f64, res: f64) -> World {
    Builder::open(width_m, height_m, res).build()
}

/// 15 m x 20 m room with a concave trap between start and goal: a U-shaped
/// enclosure opening toward the start. A straight-line follower drives into
/// the pocket and stalls; reaching the goal requires going around.
///
/// Intended start: (7.5, 2.5) facing +y. Goal: (7.5, 17.0).
pub fn bug_trap(res: f64) -> World {
    let mut b = Builder::open(15.0, 20.0, res);
    let t = 0.2; // wall thickness
    // Side walls of the trap (opening faces down toward the start).
    b.rect_fill(5.0, 7.0, 5.0 + t, 12.0, Cell::Obstacle);
    b.rect_fill(10.0 - t, 7.0, 10.0, 12.0, Cell::Obstacle);
    // Trap ceiling.
    b.rect_fill(5.0, 12.0 - t, 10.0, 12.0, Cell::Obstacle);
    b.build()
}

/// 60 m x 70 m ring corridor (real-world scale, 0.2 m resolution). The ring
/// runs between the outer walls and a solid inner block; a radial wall
/// across the west leg separates start from goal, forcing a full
/// circumnavigation that revisits the west leg — the loop-closure fixture.
///
/// Intended start: (7.0, 12.0) facing +y. Goal: (7.0, 8.0), on the far side
/// of the radial wall.
pub fn corridor_loop(res: f64) -> World {
    let mut b = Builder::open(60.0, 70.0, res);
    // Solid inner block leaves a 4 m corridor inside a 5 m outer margin.
    b.rect_fill(9.0, 9.0, 51.0, 61.0, Cell::Obstacle);
    // Radial wall across the west leg, between start (above) and goal
    // (below).
    b.rect_fill(0.0, 10.0 - 0.4, 9.0, 10.0, Cell::Obstacle);
    b.build()
}

/// 15 m x 20 m room split by a thin wall with passages around both ends.
/// Proximity across the wall triggers loop candidates that connectivity
/// validation must reject: the sides only connect around the ends.
///
/// Intended start: (4.0, 10.0). Goal: (11.0, 10.0), straight across the
/// wall.
pub fn low_wall(res: f64) -> World {
    let mut b = Builder::open(15.0, 20.0, res);
    // Wall at x = 7.4..7.6, spanning y in [3, 17]: gaps near both ends.
    b.rect_fill(7.4, 3.0, 7.6, 17.0, Cell::Obstacle);
    b.build()
}

/// 12 m x 12 m room with a sealed chamber in the middle. A goal inside the
/// chamber is unreachable; exploration must terminate with no frontiers.
///
/// Intended start: (2.0, 2.0). Goal: (6.0, 6.0) (inside the chamber).
pub fn sealed_chamber(res: f64) -> World {
    let mut b = Builder::open(12.0, 12.0, res);
    b.rect_fill(4.5, 4.5, 7.5, 7.5, Cell::Obstacle);
    // Hollow interior, fully sealed by a 0.5 m shell.
    b.rect_fill(5.0, 5.0, 7.0, 7.0, Cell::Free);
    b.build()
}
