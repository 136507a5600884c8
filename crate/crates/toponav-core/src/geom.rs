//! Planar geometry: points, poses, and reference frames.

use core::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::mathx;

/// Reference frame a pose is expressed in.
///
/// `GroundTruth` is the simulator's true world frame, `Odometry` is the
/// drifting dead-reckoned frame, and `Corrected` is the loop-corrected frame
/// submap anchors live in. Pose arithmetic is only defined between poses of
/// the same frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    GroundTruth,
    Odometry,
    Corrected,
}

/// A position in some (implicit) planar frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        mathx::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Normalize an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut r = mathx::rem_euclid(theta, TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// A planar pose `(x, y, theta)` tagged with the frame it is expressed in.
///
/// `theta` is kept normalized in `(-pi, pi]`. `compose`, `inverse` and
/// `relative_to` panic when mixing frames; crossing frames is always an
/// explicit re-tag via [`Pose2::with_frame`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub frame: Frame,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64, frame: Frame) -> Self {
        Pose2 {
            x,
            y,
            theta: normalize_angle(theta),
            frame,
        }
    }

    pub fn identity(frame: Frame) -> Self {
        Pose2 {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            frame,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Re-tag the pose into another frame without changing coordinates.
    pub fn with_frame(&self, frame: Frame) -> Pose2 {
        Pose2 { frame, ..*self }
    }

    fn check_frame(&self, other: &Pose2) {
        assert_eq!(
            self.frame, other.frame,
            "pose arithmetic across frames: {:?} vs {:?}",
            self.frame, other.frame
        );
    }

    /// `self * local`: apply a relative pose expressed in this pose's frame.
    pub fn compose(&self, local: &Pose2) -> Pose2 {
        self.check_frame(local);
        let (s, c) = (mathx::sin(self.theta), mathx::cos(self.theta));
        Pose2::new(
            self.x + local.x * c - local.y * s,
            self.y + local.x * s + local.y * c,
            self.theta + local.theta,
            self.frame,
        )
    }

    pub fn inverse(&self) -> Pose2 {
        let (s, c) = (mathx::sin(self.theta), mathx::cos(self.theta));
        Pose2::new(
            -(self.x * c + self.y * s),
            self.x * s - self.y * c,
            -self.theta,
            self.frame,
        )
    }

    /// Relative pose `base^-1 * self`, i.e. this pose expressed in `base`'s
    /// local frame: `base.compose(&self.relative_to(&base)) == self`.
    pub fn relative_to(&self, base: &Pose2) -> Pose2 {
        self.check_frame(base);
        base.inverse().compose(self)
    }

    /// Map a point from this pose's local frame into its parent frame.
    pub fn transform_point(&self, p: &Point) -> Point {
        let (s, c) = (mathx::sin(self.theta), mathx::cos(self.theta));
        Point::new(self.x + p.x * c - p.y * s, self.y + p.x * s + p.y * c)
    }

    /// Map a point from the parent frame into this pose's local frame.
    pub fn untransform_point(&self, p: &Point) -> Point {
        let (s, c) = (mathx::sin(self.theta), mathx::cos(self.theta));
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        Point::new(dx * c + dy * s, -dx * s + dy * c)
    }

    /// Translation distance between two poses of the same frame.
    pub fn translation_dist(&self, other: &Pose2) -> f64 {
        self.check_frame(other);
        mathx::hypot(self.x - other.x, self.y - other.y)
    }
}
