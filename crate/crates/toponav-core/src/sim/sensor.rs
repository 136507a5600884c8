//! Range sensing by DDA ray casts over the world grid.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Pose2};
use crate::grid::traverse_ray;
use crate::mathx;
use crate::sim::world::{Cell, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensorKind {
    DepthCamera,
    Lidar,
}

/// Planar range sensor: `beam_count = round(fov / angular_resolution) + 1`
/// bearings spread symmetrically about the heading.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SensorModel {
    pub max_range: f64,
    pub fov: f64,
    pub angular_resolution: f64,
    pub kind: SensorKind,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SensorModelError {
    #[error("max_range must be positive, got {0}")]
    BadRange(f64),
    #[error("fov must be in (0, 2pi], got {0}")]
    BadFov(f64),
    #[error("angular_resolution {ar} does not divide fov {fov} evenly")]
    UnevenFov { fov: f64, ar: f64 },
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), SensorModelError> {
        if !(self.max_range > 0.0) {
            return Err(SensorModelError::BadRange(self.max_range));
        }
        if !(self.fov > 0.0 && self.fov <= core::f64::consts::TAU + 1e-12) {
            return Err(SensorModelError::BadFov(self.fov));
        }
        let steps = self.fov / self.angular_resolution;
        if !(self.angular_resolution > 0.0) || mathx::abs(steps - mathx::round(steps)) > 1e-9 {
            return Err(SensorModelError::UnevenFov {
                fov: self.fov,
                ar: self.angular_resolution,
            });
        }
        Ok(())
    }

    pub fn beam_count(&self) -> usize {
        mathx::round(self.fov / self.angular_resolution) as usize + 1
    }

    /// Beam bearings relative to the heading, ascending from `-fov/2`.
    pub fn bearings(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.beam_count();
        let start = -self.fov / 2.0;
        let ar = self.angular_resolution;
        (0..n).map(move |k| start + k as f64 * ar)
    }
}

/// One sensor ray. `ground` carries terrain-height samples along the beam as
/// `(distance, height)` pairs, one per crossed cell — the 2.5D elevation
/// channel of the sensor. Distances are relative measurements, so the scan
/// can be re-anchored at a drifted pose without leaking ground truth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Beam {
    pub bearing: f64,
    pub range: f64,
    pub hit: bool,
    pub ground: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RangeScan {
    pub origin: Pose2,
    pub beams: Vec<Beam>,
}

impl RangeScan {
    /// The same relative measurements anchored at a different origin pose
    /// (e.g. the drifting odometry estimate of where the scan was taken).
    pub fn rebased(&self, origin: Pose2) -> RangeScan {
        RangeScan {
            origin,
            beams: self.beams.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SenseError {
    #[error("sensor pose ({0}, {1}) is inside an obstacle cell")]
    PoseInObstacle(f64, f64),
    #[error(transparent)]
    BadSensor(#[from] SensorModelError),
}

/// Cast every beam of `sensor` from `true_pose` through `world`.
///
/// A beam's range is the distance to the entry face of the first obstacle
/// cell along the ray (corner grazes count as hits), clipped at `max_range`
/// with `hit = false` when nothing was struck.
pub fn sense(world: &World, true_pose: &Pose2, sensor: &SensorModel) -> Result<RangeScan, SenseError> {
    sensor.validate()?;
    if !world.is_free_at(true_pose.x, true_pose.y) {
        return Err(SenseError::PoseInObstacle(true_pose.x, true_pose.y));
    }
    let origin = true_pose.position();
    let res = world.resolution();
    let mut beams = Vec::with_capacity(sensor.beam_count());
    for bearing in sensor.bearings() {
        let angle = true_pose.theta + bearing;
        let dir = (mathx::cos(angle), mathx::sin(angle));
        let mut range = sensor.max_range;
        let mut hit = false;
        let mut ground = Vec::new();
        traverse_ray(origin, dir, sensor.max_range, res, |rc| {
            if world.cell(rc.cell.0, rc.cell.1) == Cell::Obstacle {
                if rc.t_entry < sensor.max_range {
                    range = rc.t_entry;
                    hit = true;
                    ground.push((rc.t_entry, world.elevation_at(rc.cell)));
                }
                return false;
            }
            let mid = 0.5 * (rc.t_entry + rc.t_exit);
            if mid < sensor.max_range {
                ground.push((mid, world.elevation_at(rc.cell)));
            }
            true
        });
        beams.push(Beam {
            bearing,
            range,
            hit,
            ground,
        });
    }
    Ok(RangeScan {
        origin: *true_pose,
        beams,
    })
}

/// Distance from `origin` to the nearest obstacle-cell border along `dir`,
/// computed by intersecting the ray with every obstacle cell's four border
/// segments. Test oracle for [`sense`]; O(cells) per query.
pub fn analytic_range_oracle(world: &World, origin: Point, dir: (f64, f64), max_range: f64) -> f64 {
    let res = world.resolution();
    let mut best = max_range;
    for y in 0..world.height_cells() as i64 {
        for x in 0..world.width_cells() as i64 {
            if world.cell(x, y) != Cell::Obstacle {
                continue;
            }
            let x0 = x as f64 * res;
            let y0 = y as f64 * res;
            let x1 = x0 + res;
            let y1 = y0 + res;
            // Vertical borders.
            for bx in [x0, x1] {
                if dir.0 != 0.0 {
                    let t = (bx - origin.x) / dir.0;
                    if t >= 0.0 && t < best {
                        let py = origin.y + t * dir.1;
                        if py >= y0 - 1e-12 && py <= y1 + 1e-12 {
                            best = t;
                        }
                    }
                }
            }
            // Horizontal borders.
            for by in [y0, y1] {
                if dir.1 != 0.0 {
                    let t = (by - origin.y) / dir.1;
                    if t >= 0.0 && t < best {
                        let px = origin.x + t * dir.0;
                        if px >= x0 - 1e-12 && px <= x1 + 1e-12 {
                            best = t;
                        }
                    }
                }
            }
        }
    }
    best
}
