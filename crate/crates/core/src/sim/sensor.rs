use super::{Pose, Scenario};
use crate::avoidance::RangeReading;
use crate::pathfind::WorldPoint;

/// Distance along the ray from `origin` in compass direction `bearing_deg`
/// to the first circle or boundary wall, uncapped.
pub fn cast_ray(origin: WorldPoint, bearing_deg: f64, scenario: &Scenario) -> f64 {
    let (ux, uy) = bearing_deg.to_radians().sin_cos();
    let mut best = f64::INFINITY;
    for o in &scenario.obstacles {
        if let Some(t) = ray_circle(origin, ux, uy, o.center, o.radius) {
            best = best.min(t);
        }
    }
    let walls = [
        (ux, origin.x, scenario.bounds.width),
        (uy, origin.y, scenario.bounds.height),
    ];
    for (dir, pos, max) in walls {
        if dir > 1e-12 {
            best = best.min((max - pos) / dir);
        } else if dir < -1e-12 {
            best = best.min(pos / -dir);
        }
    }
    best.max(0.0)
}

/// Nearest non-negative ray parameter where the unit ray meets the circle.
fn ray_circle(origin: WorldPoint, ux: f64, uy: f64, center: WorldPoint, radius: f64) -> Option<f64> {
    let (fx, fy) = (origin.x - center.x, origin.y - center.y);
    let b = fx * ux + fy * uy;
    let c = fx * fx + fy * fy - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let disc = b * b - c;
    if disc < 0.0 || b >= 0.0 {
        return None;
    }
    Some(-b - disc.sqrt())
}

/// Ultrasound reading: the minimum over the scenario's ray cone, measured
/// from the robot center and capped at the sensor's maximum range.
pub fn raycast_ultrasound(pose: Pose, scenario: &Scenario) -> RangeReading {
    let max = scenario.params.sensor_max_range;
    let d = scenario
        .params
        .sensor_cone_deg
        .iter()
        .map(|off| cast_ray(pose.position, pose.heading_deg + off, scenario))
        .fold(max, f64::min);
    RangeReading::new(d, max)
}
