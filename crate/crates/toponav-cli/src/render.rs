//! Deterministic PNG rendering of world, map state, and plan overlays.
//!
//! Pure function of its inputs: identical state renders to byte-identical
//! image files.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};
use toponav_core::geom::Point;
use toponav_core::planner::Plan;
use toponav_core::sim::{Cell, World};
use toponav_core::submap::SubmapStore;
use toponav_core::topology::{EdgeKind, GlobalTopology};

use crate::snapshot::{CellCode, FrameSnapshot};

const COLOR_FREE: Rgb<u8> = Rgb([245, 245, 245]);
const COLOR_OBSTACLE: Rgb<u8> = Rgb([40, 40, 40]);
const COLOR_UNKNOWN: Rgb<u8> = Rgb([210, 210, 215]);
const COLOR_TRAVERSABLE: Rgb<u8> = Rgb([205, 235, 205]);
const COLOR_INFLATED: Rgb<u8> = Rgb([235, 215, 185]);
const COLOR_ROADMAP: Rgb<u8> = Rgb([250, 165, 60]);
const COLOR_TOPO: Rgb<u8> = Rgb([40, 150, 60]);
const COLOR_FRONTIER: Rgb<u8> = Rgb([50, 90, 230]);
const COLOR_PLAN: Rgb<u8> = Rgb([220, 40, 40]);
const COLOR_ROBOT: Rgb<u8> = Rgb([130, 40, 170]);
const COLOR_ANCHOR: Rgb<u8> = Rgb([20, 110, 40]);

pub struct RenderInputs<'a> {
    pub world: &'a World,
    pub store: Option<&'a SubmapStore>,
    pub topology: Option<&'a GlobalTopology>,
    pub frame: Option<&'a FrameSnapshot>,
    pub plan: Option<&'a Plan>,
}

struct Canvas {
    img: RgbImage,
    scale: u32,
    resolution: f64,
    height_px: u32,
}

impl Canvas {
    fn new(world: &World, scale: u32) -> Self {
        let w = world.width_cells() as u32 * scale;
        let h = world.height_cells() as u32 * scale;
        Canvas {
            img: RgbImage::from_pixel(w, h, COLOR_FREE),
            scale,
            resolution: world.resolution(),
            height_px: h,
        }
    }

    fn fill_cell(&mut self, cell: (i64, i64), color: Rgb<u8>) {
        for dy in 0..self.scale {
            for dx in 0..self.scale {
                let px = cell.0 as i64 * self.scale as i64 + dx as i64;
                // Image rows grow downward; world y grows upward.
                let py = self.height_px as i64 - 1 - (cell.1 as i64 * self.scale as i64 + dy as i64);
                self.put(px, py, color);
            }
        }
    }

    fn put(&mut self, px: i64, py: i64, color: Rgb<u8>) {
        if px >= 0 && py >= 0 && (px as u32) < self.img.width() && (py as u32) < self.img.height() {
            self.img.put_pixel(px as u32, py as u32, color);
        }
    }

    fn to_px(&self, p: &Point) -> (i64, i64) {
        let px = (p.x / self.resolution * self.scale as f64) as i64;
        let py = self.height_px as i64 - 1 - (p.y / self.resolution * self.scale as f64) as i64;
        (px, py)
    }

    fn line(&mut self, a: &Point, b: &Point, color: Rgb<u8>) {
        let (x0, y0) = self.to_px(a);
        let (x1, y1) = self.to_px(b);
        // Bresenham.
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        let (mut x, mut y) = (x0, y0);
        loop {
            self.put(x, y, color);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    fn dot(&mut self, p: &Point, radius: i64, color: Rgb<u8>) {
        let (cx, cy) = self.to_px(p);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if dx * dx + dy * dy <= radius * radius {
                    self.put(cx + dx, cy + dy, color);
                }
            }
        }
    }
}

/// Render the scene to PNG bytes.
pub fn render_png(inputs: &RenderInputs, scale: u32) -> Vec<u8> {
    let scale = scale.max(1);
    let mut canvas = Canvas::new(inputs.world, scale);

    for y in 0..inputs.world.height_cells() as i64 {
        for x in 0..inputs.world.width_cells() as i64 {
            if inputs.world.cell(x, y) == Cell::Obstacle {
                canvas.fill_cell((x, y), COLOR_OBSTACLE);
            }
        }
    }

    if let Some(frame) = inputs.frame {
        let grid = &frame.grid;
        let cells = grid.expand();
        let n = grid.cells_per_side;
        for y in 0..n {
            for x in 0..n {
                let cell = (
                    grid.origin_cell.0 + x as i64,
                    grid.origin_cell.1 + y as i64,
                );
                let color = match cells[y * n + x] {
                    CellCode::Unknown => COLOR_UNKNOWN,
                    CellCode::Traversable => COLOR_TRAVERSABLE,
                    CellCode::Inflated => COLOR_INFLATED,
                    CellCode::Obstacle => COLOR_OBSTACLE,
                    CellCode::Untraversable => continue,
                };
                // The window is in odometry coordinates; rendered directly
                // (world-aligned at zero drift, visibly offset otherwise).
                if grid.resolution == inputs.world.resolution() {
                    canvas.fill_cell(cell, color);
                }
            }
        }
    }

    if let Some(store) = inputs.store {
        for submap in store.iter() {
            for e in &submap.roadmap.edges {
                let a = submap.vertex_position_corrected(e.a);
                let b = submap.vertex_position_corrected(e.b);
                canvas.line(&a, &b, COLOR_ROADMAP);
            }
        }
        for submap in store.iter() {
            for &vid in &submap.frontier_vertex_ids {
                let p = submap.vertex_position_corrected(vid);
                canvas.dot(&p, scale as i64 / 2 + 1, COLOR_FRONTIER);
            }
        }
        if let Some(topology) = inputs.topology {
            for e in topology.edges() {
                if let (Ok(a), Ok(b)) = (store.get(e.a), store.get(e.b)) {
                    canvas.line(&a.anchor.position(), &b.anchor.position(), COLOR_TOPO);
                    if e.kind == EdgeKind::ValidatedLoop {
                        // Double-strike loop edges so they stand out.
                        let mid = Point::new(
                            0.5 * (a.anchor.x + b.anchor.x),
                            0.5 * (a.anchor.y + b.anchor.y),
                        );
                        canvas.dot(&mid, scale as i64 / 2 + 1, COLOR_TOPO);
                    }
                }
            }
            for &id in topology.nodes() {
                if let Ok(s) = store.get(id) {
                    canvas.dot(&s.anchor.position(), scale as i64 / 2 + 2, COLOR_ANCHOR);
                }
            }
        }
    }

    if let Some(plan) = inputs.plan {
        for pair in plan.waypoints.windows(2) {
            canvas.line(&pair[0], &pair[1], COLOR_PLAN);
        }
        for wp in &plan.waypoints {
            canvas.dot(wp, scale as i64 / 3 + 1, COLOR_PLAN);
        }
    }

    if let Some(frame) = inputs.frame {
        let robot = Point::new(frame.robot.0, frame.robot.1);
        canvas.dot(&robot, scale as i64 + 1, COLOR_ROBOT);
        let heading = Point::new(
            robot.x + frame.robot.2.cos() * canvas.resolution * 3.0,
            robot.y + frame.robot.2.sin() * canvas.resolution * 3.0,
        );
        canvas.line(&robot, &heading, COLOR_ROBOT);
    }

    let mut bytes = Cursor::new(Vec::new());
    canvas
        .img
        .write_to(&mut bytes, ImageFormat::Png)
        .expect("png encode");
    bytes.into_inner()
}

pub fn render_to_file(
    path: &Path,
    inputs: &RenderInputs,
    scale: u32,
) -> Result<(), std::io::Error> {
    std::fs::write(path, render_png(inputs, scale))
}
