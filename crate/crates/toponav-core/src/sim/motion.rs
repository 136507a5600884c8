//! Unicycle kinematics with collision clamping and seeded odometry drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geom::{Point, Pose2};
use crate::grid::traverse_segment;
use crate::mathx;
use crate::sim::world::{Cell, World};

/// Velocity command `(v, w)` applied for one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionCommand {
    pub v: f64,
    pub w: f64,
}

/// Odometry drift configuration. Determinism contract: identical seed and
/// command sequence produce bit-identical odometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftModel {
    pub trans_drift_per_meter: f64,
    pub rot_drift_per_meter: f64,
    pub seed: u64,
}

impl DriftModel {
    pub fn none(seed: u64) -> Self {
        DriftModel {
            trans_drift_per_meter: 0.0,
            rot_drift_per_meter: 0.0,
            seed,
        }
    }
}

/// Live drift generator. A per-run systematic bias direction is drawn once
/// from the seed; each step adds bias proportional to the executed distance
/// plus a small distance-scaled white term, all in the robot body frame.
pub struct DriftState {
    model: DriftModel,
    rng: ChaCha8Rng,
    bias: (f64, f64),
    rot_bias: f64,
}

impl DriftState {
    pub fn new(model: DriftModel) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        let angle: f64 = rng.random::<f64>() * core::f64::consts::TAU;
        let rot_bias: f64 = StandardNormal.sample(&mut rng);
        DriftState {
            model,
            rng,
            bias: (mathx::cos(angle), mathx::sin(angle)),
            rot_bias,
        }
    }

    pub fn model(&self) -> &DriftModel {
        &self.model
    }

    /// Body-frame perturbation `(dx, dy, dtheta)` for one step of executed
    /// distance `d`. Exactly zero when both drift coefficients are zero.
    fn perturbation(&mut self, d: f64) -> (f64, f64, f64) {
        if d <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let nx: f64 = StandardNormal.sample(&mut self.rng);
        let ny: f64 = StandardNormal.sample(&mut self.rng);
        let nt: f64 = StandardNormal.sample(&mut self.rng);
        let k = self.model.trans_drift_per_meter;
        let r = self.model.rot_drift_per_meter;
        let white = 0.3 * mathx::sqrt(d);
        (
            k * (d * self.bias.0 + white * nx),
            k * (d * self.bias.1 + white * ny),
            r * (d * self.rot_bias + white * nt),
        )
    }
}

/// Result of one simulation step.
#[derive(Clone, Copy, Debug)]
pub struct StepOutcome {
    pub true_pose: Pose2,
    pub odom_pose: Pose2,
    /// Translation was clamped at an obstacle contact.
    pub collided: bool,
    /// Arc length actually executed (chord length after clamping).
    pub distance: f64,
}

/// World-frame displacement of unicycle motion from heading `theta`.
fn unicycle_delta(theta: f64, cmd: MotionCommand, dt: f64) -> (f64, f64, f64) {
    let dtheta = cmd.w * dt;
    if mathx::abs(cmd.w) < 1e-12 {
        (
            cmd.v * dt * mathx::cos(theta),
            cmd.v * dt * mathx::sin(theta),
            dtheta,
        )
    } else {
        let radius = cmd.v / cmd.w;
        (
            radius * (mathx::sin(theta + dtheta) - mathx::sin(theta)),
            -radius * (mathx::cos(theta + dtheta) - mathx::cos(theta)),
            dtheta,
        )
    }
}

/// Advance the true pose by exact unicycle kinematics (translation clamped at
/// the first obstacle contact) and the odometry pose by the same executed
/// motion plus seeded drift.
///
/// Both poses are advanced through the identical scaled-displacement formula,
/// so with zero drift coefficients and equal starting coordinates the
/// odometry stream stays bit-identical to ground truth.
pub fn step(
    world: &World,
    true_pose: &Pose2,
    odom_pose: &Pose2,
    cmd: MotionCommand,
    dt: f64,
    drift: &mut DriftState,
) -> StepOutcome {
    assert!(dt > 0.0, "dt must be positive");
    let (dx, dy, dtheta) = unicycle_delta(true_pose.theta, cmd, dt);
    let full = mathx::hypot(dx, dy);

    // Clamp translation at the first obstacle contact along the chord.
    let mut scale = 1.0;
    let mut collided = false;
    if full > 0.0 {
        let from = true_pose.position();
        let to = Point::new(true_pose.x + dx, true_pose.y + dy);
        let mut t_hit = None;
        traverse_segment(from, to, world.resolution(), |rc| {
            if world.cell(rc.cell.0, rc.cell.1) == Cell::Obstacle {
                t_hit = Some(rc.t_entry);
                false
            } else {
                true
            }
        });
        if let Some(t) = t_hit {
            collided = true;
            let standoff = (world.resolution() * 0.01).min(t);
            scale = ((t - standoff) / full).max(0.0);
        }
    }

    let executed = full * scale;
    let advance = |pose: &Pose2| -> Pose2 {
        Pose2::new(
            pose.x + dx * scale,
            pose.y + dy * scale,
            pose.theta + dtheta,
            pose.frame,
        )
    };
    let new_true = advance(true_pose);
    let nominal_odom = advance(odom_pose);

    let (ex, ey, et) = drift.perturbation(executed);
    let new_odom = nominal_odom.compose(&Pose2::new(ex, ey, et, nominal_odom.frame));

    StepOutcome {
        true_pose: new_true,
        odom_pose: new_odom,
        collided,
        distance: executed,
    }
}
