//! Shared grid machinery: ray traversal over a cell lattice, an exact
//! Euclidean distance transform, and a spatial hash for point queries.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::geom::Point;
use crate::mathx;

/// Integer lattice coordinates of a grid cell. Signed: robot-centric windows
/// in the odometry frame can extend into negative cell indices.
pub type CellIndex = (i64, i64);

/// Cell containing a point, for a lattice of the given resolution anchored at
/// the frame origin.
pub fn cell_of(x: f64, y: f64, resolution: f64) -> CellIndex {
    (
        mathx::floor(x / resolution) as i64,
        mathx::floor(y / resolution) as i64,
    )
}

/// Center of a lattice cell.
pub fn cell_center(cell: CellIndex, resolution: f64) -> Point {
    Point::new(
        (cell.0 as f64 + 0.5) * resolution,
        (cell.1 as f64 + 0.5) * resolution,
    )
}

/// One cell crossed by a ray, with entry and exit distances along the ray.
/// `t_exit` is the full border-to-border crossing, which may extend past the
/// traversal's `max_t` for the final cell — midpoint tests need the true
/// crossing interval. At an exact lattice-corner crossing the two side cells
/// are reported as zero-width crossings (`t_entry == t_exit`) before the
/// diagonal cell, so a corner graze still touches them.
#[derive(Clone, Copy, Debug)]
pub struct RayCell {
    pub cell: CellIndex,
    pub t_entry: f64,
    pub t_exit: f64,
}

/// Walk the cells crossed by a ray from `origin` along the unit direction
/// `dir` up to distance `max_t`. The visitor returns `false` to stop early.
pub fn traverse_ray<F>(origin: Point, dir: (f64, f64), max_t: f64, resolution: f64, mut visit: F)
where
    F: FnMut(RayCell) -> bool,
{
    let (mut cx, mut cy) = cell_of(origin.x, origin.y, resolution);
    let step_x: i64 = if dir.0 > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dir.1 > 0.0 { 1 } else { -1 };

    // Distance along the ray to the next vertical / horizontal cell border.
    let next_border = |c: i64, step: i64, o: f64, d: f64| -> f64 {
        if d == 0.0 {
            return f64::INFINITY;
        }
        let edge = if step > 0 { (c + 1) as f64 } else { c as f64 } * resolution;
        (edge - o) / d
    };
    let mut t_max_x = next_border(cx, step_x, origin.x, dir.0);
    let mut t_max_y = next_border(cy, step_y, origin.y, dir.1);
    let t_delta_x = if dir.0 == 0.0 {
        f64::INFINITY
    } else {
        resolution / mathx::abs(dir.0)
    };
    let t_delta_y = if dir.1 == 0.0 {
        f64::INFINITY
    } else {
        resolution / mathx::abs(dir.1)
    };

    let mut t_entry = 0.0;
    loop {
        let t_exit = t_max_x.min(t_max_y);
        if !visit(RayCell {
            cell: (cx, cy),
            t_entry,
            t_exit,
        }) {
            return;
        }
        if t_max_x.min(t_max_y) >= max_t {
            return;
        }
        if t_max_x < t_max_y {
            t_entry = t_max_x;
            t_max_x += t_delta_x;
            cx += step_x;
        } else if t_max_y < t_max_x {
            t_entry = t_max_y;
            t_max_y += t_delta_y;
            cy += step_y;
        } else {
            // Exact corner: graze both side cells, then continue diagonally.
            t_entry = t_max_x;
            if !visit(RayCell {
                cell: (cx + step_x, cy),
                t_entry,
                t_exit: t_entry,
            }) {
                return;
            }
            if !visit(RayCell {
                cell: (cx, cy + step_y),
                t_entry,
                t_exit: t_entry,
            }) {
                return;
            }
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
            cx += step_x;
            cy += step_y;
        }
    }
}

/// Walk the cells crossed by the segment `a -> b` (both endpoint cells
/// included). The visitor returns `false` to stop early.
pub fn traverse_segment<F>(a: Point, b: Point, resolution: f64, mut visit: F)
where
    F: FnMut(RayCell) -> bool,
{
    let len = a.dist(&b);
    if len == 0.0 {
        visit(RayCell {
            cell: cell_of(a.x, a.y, resolution),
            t_entry: 0.0,
            t_exit: 0.0,
        });
        return;
    }
    let dir = ((b.x - a.x) / len, (b.y - a.y) / len);
    traverse_ray(a, dir, len, resolution, |rc| visit(rc));
}

/// Exact squared Euclidean distance transform (two 1D passes) over a
/// `width x height` grid; `seed` marks distance-zero cells. Distances are in
/// cell units, squared.
pub fn distance_transform_sq<S>(width: usize, height: usize, seed: S) -> Vec<f64>
where
    S: Fn(usize, usize) -> bool,
{
    const INF: f64 = 1e20;
    let mut field = alloc::vec![INF; width * height];
    for y in 0..height {
        for x in 0..width {
            if seed(x, y) {
                field[y * width + x] = 0.0;
            }
        }
    }
    // Columns, then rows.
    let mut scratch = alloc::vec![0.0f64; width.max(height)];
    for x in 0..width {
        for y in 0..height {
            scratch[y] = field[y * width + x];
        }
        let out = dt_1d(&scratch[..height]);
        for y in 0..height {
            field[y * width + x] = out[y];
        }
    }
    for y in 0..height {
        scratch[..width].copy_from_slice(&field[y * width..(y + 1) * width]);
        let out = dt_1d(&scratch[..width]);
        field[y * width..(y + 1) * width].copy_from_slice(&out);
    }
    field
}

/// 1D squared distance transform of a sampled function (Felzenszwalb &
/// Huttenlocher lower envelope of parabolas).
fn dt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = alloc::vec![0.0f64; n];
    let mut v = alloc::vec![0usize; n];
    let mut z = alloc::vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = -1e20;
    z[1] = 1e20;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                break;
            }
        }
        if s > z[k] {
            k += 1;
        }
        v[k] = q;
        z[k] = s;
        z[k + 1] = 1e20;
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        d[q] = dq * dq + f[p];
    }
    d
}

/// Spatial hash over points for radius queries. Buckets are kept in a
/// `BTreeMap` so iteration order (and therefore every query result) is
/// deterministic.
pub struct PointIndex {
    cell: f64,
    buckets: BTreeMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl PointIndex {
    pub fn new(cell: f64) -> Self {
        PointIndex {
            cell,
            buckets: BTreeMap::new(),
            points: Vec::new(),
        }
    }

    pub fn with_points(cell: f64, points: impl IntoIterator<Item = Point>) -> Self {
        let mut idx = PointIndex::new(cell);
        for p in points {
            idx.insert(p);
        }
        idx
    }

    pub fn insert(&mut self, p: Point) -> usize {
        let id = self.points.len();
        self.points.push(p);
        let key = cell_of(p.x, p.y, self.cell);
        self.buckets.entry(key).or_default().push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    /// Indices of points within `radius` of `p`, ascending.
    pub fn within(&self, p: &Point, radius: f64) -> Vec<usize> {
        let r_cells = (radius / self.cell) as i64 + 1;
        let (cx, cy) = cell_of(p.x, p.y, self.cell);
        let r_sq = radius * radius;
        let mut out = Vec::new();
        for by in (cy - r_cells)..=(cy + r_cells) {
            for bx in (cx - r_cells)..=(cx + r_cells) {
                if let Some(ids) = self.buckets.get(&(bx, by)) {
                    for &id in ids {
                        if self.points[id].dist_sq(p) <= r_sq {
                            out.push(id);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Nearest point index within `radius`, ties broken by lowest index.
    pub fn nearest_within(&self, p: &Point, radius: f64) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for id in self.within(p, radius) {
            let d = self.points[id].dist_sq(p);
            match best {
                Some((bd, _)) if bd <= d => {}
                _ => best = Some((d, id)),
            }
        }
        best.map(|(_, id)| id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn axis_ray_crosses_expected_cells() {
        let mut cells = Vec::new();
        traverse_ray(
            Point::new(0.05, 0.05),
            (1.0, 0.0),
            0.35,
            0.1,
            |rc| {
                cells.push(rc.cell);
                true
            },
        );
        assert_eq!(cells, alloc::vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn diagonal_corner_grazes_side_cells() {
        let mut cells = Vec::new();
        traverse_ray(
            Point::new(0.05, 0.05),
            (core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
            0.2,
            0.1,
            |rc| {
                cells.push(rc.cell);
                true
            },
        );
        // Corner at (0.1, 0.1): both side cells grazed, then the diagonal.
        assert!(cells.contains(&(1, 0)));
        assert!(cells.contains(&(0, 1)));
        assert!(cells.contains(&(1, 1)));
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let w = 13;
        let h = 9;
        let seeds = [(2usize, 3usize), (10, 1), (7, 8)];
        let dt = distance_transform_sq(w, h, |x, y| seeds.contains(&(x, y)));
        for y in 0..h {
            for x in 0..w {
                let want = seeds
                    .iter()
                    .map(|&(sx, sy)| {
                        let dx = sx as f64 - x as f64;
                        let dy = sy as f64 - y as f64;
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (dt[y * w + x] - want).abs() < 1e-9,
                    "cell ({x},{y}): {} vs {}",
                    dt[y * w + x],
                    want
                );
            }
        }
    }

    #[test]
    fn point_index_radius_query() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 2.5),
            Point::new(-0.4, 0.3),
        ];
        let idx = PointIndex::with_points(0.5, pts);
        assert_eq!(idx.within(&Point::new(0.0, 0.0), 1.05), alloc::vec![0, 1, 3]);
        assert_eq!(idx.nearest_within(&Point::new(0.1, 0.1), 1.0), Some(0));
        assert_eq!(idx.nearest_within(&Point::new(5.0, 5.0), 1.0), None);
    }
}
