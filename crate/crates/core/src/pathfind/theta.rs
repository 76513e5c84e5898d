use std::time::Instant;

use super::{PathfindError, PlanResult, WorldPoint};
use crate::geometry::{normalize_deg, ThetaDeg};

/// Arithmetic steps performed by [`theta_plan`]: two deltas, the bearing, its
/// conversion to degrees, the heading difference, the wrap, the distance, and
/// the two path points.
pub const THETA_PLAN_OPS: u64 = 9;

/// Signed smallest turn from `heading_deg` (compass: 0 = north, clockwise
/// positive) to the bearing of `target` as seen from `robot`.
pub fn theta_to_target(robot: WorldPoint, heading_deg: f64, target: WorldPoint) -> Result<ThetaDeg, PathfindError> {
    let (dx, dy) = (target.x - robot.x, target.y - robot.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(PathfindError::ZeroLengthBearing(robot));
    }
    let bearing = dx.atan2(dy).to_degrees();
    ThetaDeg::new(normalize_deg(bearing - heading_deg)).map_err(|_| PathfindError::ZeroLengthBearing(robot))
}

/// Direct path: one turn, then a straight line to the target.
pub fn theta_plan(
    robot: WorldPoint,
    heading_deg: f64,
    target: WorldPoint,
) -> Result<(PlanResult, ThetaDeg), PathfindError> {
    let started = Instant::now();
    let theta = theta_to_target(robot, heading_deg, target)?;
    let cost = robot.distance(&target);
    Ok((
        PlanResult {
            path: vec![robot, target],
            cost,
            ops: THETA_PLAN_OPS,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
        theta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn w(x: f64, y: f64) -> WorldPoint {
        WorldPoint::new(x, y)
    }

    /// Oracle: scan candidate turns in 1/1000 degree steps for the one that
    /// best aligns the heading vector with the target direction.
    fn brute_force_turn(robot: WorldPoint, heading: f64, target: WorldPoint) -> f64 {
        let (dx, dy) = (target.x - robot.x, target.y - robot.y);
        let len = dx.hypot(dy);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in -179_999..=180_000 {
            let turn = k as f64 / 1000.0;
            let (s, c) = (heading + turn).to_radians().sin_cos();
            let dot = (s * dx + c * dy) / len;
            if dot > best.0 {
                best = (dot, turn);
            }
        }
        best.1
    }

    #[test]
    fn compass_examples() {
        assert!((theta_to_target(w(0.0, 0.0), 0.0, w(100.0, 100.0)).unwrap().value() - 45.0).abs() < 1e-12);
        assert_eq!(theta_to_target(w(0.0, 0.0), 0.0, w(0.0, 50.0)).unwrap().value(), 0.0);
        assert!((theta_to_target(w(0.0, 0.0), 0.0, w(-100.0, 100.0)).unwrap().value() + 45.0).abs() < 1e-12);
        let t = theta_to_target(w(0.0, 0.0), 90.0, w(0.0, 50.0)).unwrap().value();
        assert!((t - brute_force_turn(w(0.0, 0.0), 90.0, w(0.0, 50.0))).abs() < 1e-3);
        assert!((t + 90.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_error() {
        assert!(matches!(
            theta_to_target(w(3.0, 4.0), 10.0, w(3.0, 4.0)),
            Err(PathfindError::ZeroLengthBearing(_))
        ));
        assert!(theta_plan(w(1.0, 1.0), 0.0, w(1.0, 1.0)).is_err());
    }

    #[test]
    fn straight_line_costs() {
        let (r, _) = theta_plan(w(0.0, 0.0), 0.0, w(300.0, 400.0)).unwrap();
        assert_eq!(r.cost, 500.0);
        assert_eq!(r.path.len(), 2);
        let (r, _) = theta_plan(w(0.0, 0.0), 0.0, w(0.0, 100.0)).unwrap();
        assert_eq!(r.cost, 100.0);
    }

    #[test]
    fn ops_constant_over_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..100 {
            let a = w(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
            let b = w(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
            let h = rng.random_range(-180.0..180.0);
            seen.insert(theta_plan(a, h, b).unwrap().0.ops);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![THETA_PLAN_OPS]);
    }

    #[test]
    fn behind_target_wraps_to_180() {
        let t = theta_to_target(w(0.0, 0.0), 0.0, w(0.0, -10.0)).unwrap().value();
        assert_eq!(t, 180.0);
    }

    proptest! {
        #[test]
        fn rotation_invariant(x in -300.0f64..300.0, y in -300.0f64..300.0,
                              tx in -300.0f64..300.0, ty in -300.0f64..300.0,
                              heading in -180.0f64..180.0, phi in -180.0f64..180.0) {
            prop_assume!((tx - x).hypot(ty - y) > 1e-3);
            let base = theta_to_target(w(x, y), heading, w(tx, ty)).unwrap().value();
            // rotate clockwise by phi (compass sense) about the origin
            let (s, c) = phi.to_radians().sin_cos();
            let rot = |p: WorldPoint| w(p.x * c + p.y * s, -p.x * s + p.y * c);
            let turned = theta_to_target(rot(w(x, y)), heading + phi, rot(w(tx, ty))).unwrap().value();
            let diff = normalize_deg(base - turned);
            prop_assert!(diff.abs() < 1e-9, "{base} vs {turned}");
        }

        #[test]
        fn within_half_open_range(x in -300.0f64..300.0, heading in -720.0f64..720.0) {
            let t = theta_to_target(w(0.0, 0.0), heading, w(x, 17.0)).unwrap().value();
            prop_assert!(t > -180.0 && t <= 180.0);
        }
    }
}
