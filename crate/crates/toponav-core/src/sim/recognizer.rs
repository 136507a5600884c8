//! Simulated place recognition: a loop candidate fires when the robot's true
//! pose comes close to the true anchor of an old submap. Deliberately blind
//! to obstacles, so proximity across an uncrossable wall still produces a
//! candidate — the failure mode loop-connectivity validation exists to catch.

use crate::geom::Pose2;
use crate::submap::SubmapId;

/// Oldest non-adjacent submap whose true anchor lies within `radius` of the
/// current true pose. The last entry of `history` is the active submap;
/// neither it nor its immediate predecessor is ever returned.
pub fn detect_loop(
    history: &[(SubmapId, Pose2)],
    current_true_pose: &Pose2,
    radius: f64,
) -> Option<SubmapId> {
    assert!(radius > 0.0, "radius must be positive");
    let (current_id, _) = *history.last()?;
    history
        .iter()
        .find(|(id, anchor)| {
            *id != current_id
                && *id + 1 != current_id
                && anchor.translation_dist(&current_true_pose.with_frame(anchor.frame)) <= radius
        })
        .map(|(id, _)| *id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Frame;
    use alloc::vec::Vec;

    fn anchor(x: f64, y: f64) -> Pose2 {
        Pose2::new(x, y, 0.0, Frame::GroundTruth)
    }

    #[test]
    fn empty_history_no_loop() {
        let pose = anchor(0.0, 0.0);
        assert_eq!(detect_loop(&[], &pose, 2.0), None);
    }

    #[test]
    fn old_anchor_in_radius_detected() {
        let history: Vec<(SubmapId, Pose2)> = (0..6)
            .map(|i| (i as SubmapId, anchor(i as f64 * 5.0, 0.0)))
            .collect();
        // Robot back near submap 0's anchor, currently in submap 5.
        let pose = anchor(1.0, 0.0);
        assert_eq!(detect_loop(&history, &pose, 2.0), Some(0));
    }

    #[test]
    fn previous_submap_excluded() {
        let history = alloc::vec![(0, anchor(0.0, 0.0)), (1, anchor(1.0, 0.0))];
        let pose = anchor(0.5, 0.0);
        assert_eq!(detect_loop(&history, &pose, 2.0), None);
    }

    #[test]
    fn oldest_match_wins() {
        let history = alloc::vec![
            (0, anchor(0.0, 0.0)),
            (1, anchor(0.5, 0.0)),
            (2, anchor(20.0, 0.0)),
            (3, anchor(21.0, 0.0)),
        ];
        let pose = anchor(0.2, 0.0);
        assert_eq!(detect_loop(&history, &pose, 2.0), Some(0));
    }

    #[test]
    fn never_adjacent_in_creation_order() {
        // Anchors all on top of each other: only ids < current - 1 eligible.
        for n in 1..8usize {
            let history: Vec<(SubmapId, Pose2)> =
                (0..n).map(|i| (i as SubmapId, anchor(0.0, 0.0))).collect();
            let pose = anchor(0.0, 0.0);
            match detect_loop(&history, &pose, 1.0) {
                Some(id) => {
                    let current = (n - 1) as SubmapId;
                    assert!(id != current && id + 1 != current);
                }
                None => assert!(n <= 2),
            }
        }
    }
}
