//! Randomized checks of the simulator against independent oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toponav_core::geom::{Frame, Pose2};
use toponav_core::sim::{
    analytic_range_oracle, sense, step, Cell, DriftModel, DriftState, MotionCommand, SensorKind,
    SensorModel, World,
};

fn random_world(rng: &mut ChaCha8Rng, n: usize, res: f64, fill: f64) -> World {
    let mut cells = vec![Cell::Free; n * n];
    for y in 0..n {
        for x in 0..n {
            let border = x == 0 || y == 0 || x == n - 1 || y == n - 1;
            if border || rng.random::<f64>() < fill {
                cells[y * n + x] = Cell::Obstacle;
            }
        }
    }
    World::new(n, n, res, cells, None).unwrap()
}

#[test]
fn dda_ranges_match_analytic_intersection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sensor = SensorModel {
        max_range: 4.0,
        fov: core::f64::consts::TAU,
        angular_resolution: core::f64::consts::TAU / 36.0,
        kind: SensorKind::Lidar,
    };
    let mut checked = 0;
    while checked < 100 {
        let world = random_world(&mut rng, 40, 0.25, 0.08);
        let x = rng.random::<f64>() * world.width_m();
        let y = rng.random::<f64>() * world.height_m();
        if !world.is_free_at(x, y) {
            continue;
        }
        let pose = Pose2::new(x, y, rng.random::<f64>() * 6.28, Frame::GroundTruth);
        let scan = sense(&world, &pose, &sensor).unwrap();
        let half_diag = world.resolution() * core::f64::consts::SQRT_2 / 2.0;
        for beam in &scan.beams {
            let angle = pose.theta + beam.bearing;
            let dir = (angle.cos(), angle.sin());
            let want = analytic_range_oracle(&world, pose.position(), dir, sensor.max_range);
            assert!(
                (beam.range - want).abs() <= half_diag,
                "bearing {}: dda {} vs oracle {}",
                beam.bearing,
                beam.range,
                want
            );
        }
        checked += 1;
    }
}

#[test]
fn scan_and_pose_streams_are_bit_identical_across_runs() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let world = random_world(&mut rng, 60, 0.25, 0.04);
        let sensor = SensorModel {
            max_range: 5.0,
            fov: core::f64::consts::FRAC_PI_2,
            angular_resolution: core::f64::consts::FRAC_PI_2 / 30.0,
            kind: SensorKind::DepthCamera,
        };
        let mut t = Pose2::new(7.5, 7.5, 0.0, Frame::GroundTruth);
        let mut o = t.with_frame(Frame::Odometry);
        let mut drift = DriftState::new(DriftModel {
            trans_drift_per_meter: 0.01,
            rot_drift_per_meter: 0.002,
            seed: 5,
        });
        let mut log: Vec<u64> = Vec::new();
        for i in 0..150 {
            let scan = sense(&world, &t, &sensor).unwrap();
            for b in &scan.beams {
                log.push(b.range.to_bits());
            }
            let cmd = MotionCommand {
                v: 0.6,
                w: 0.4 * ((i % 11) as f64 - 5.0) / 5.0,
            };
            let out = step(&world, &t, &o, cmd, 0.1, &mut drift);
            t = out.true_pose;
            o = out.odom_pose;
            log.push(t.x.to_bits());
            log.push(t.y.to_bits());
            log.push(o.x.to_bits());
            log.push(o.y.to_bits());
        }
        log
    };
    assert_eq!(run(), run());
}

#[test]
fn corner_graze_counts_as_hit() {
    // A single obstacle whose corner lies exactly on the diagonal ray path.
    let n = 9;
    let mut cells = vec![Cell::Free; n * n];
    for i in 0..n {
        cells[i] = Cell::Obstacle;
        cells[(n - 1) * n + i] = Cell::Obstacle;
        cells[i * n] = Cell::Obstacle;
        cells[i * n + n - 1] = Cell::Obstacle;
    }
    cells[4 * n + 4] = Cell::Obstacle; // corner at (4, 4) and (5, 5) in meters
    let world = World::new(n, n, 1.0, cells, None).unwrap();
    let pose = Pose2::new(3.0, 3.0, core::f64::consts::FRAC_PI_4, Frame::GroundTruth);
    let sensor = SensorModel {
        max_range: 6.0,
        fov: core::f64::consts::FRAC_PI_2,
        angular_resolution: core::f64::consts::FRAC_PI_4,
        kind: SensorKind::Lidar,
    };
    let scan = sense(&world, &pose, &sensor).unwrap();
    // Middle beam heads straight at the obstacle corner (4, 4).
    let mid = &scan.beams[1];
    assert_eq!(mid.bearing, 0.0);
    assert!(mid.hit);
    assert!((mid.range - core::f64::consts::SQRT_2).abs() < 1e-9);
}
