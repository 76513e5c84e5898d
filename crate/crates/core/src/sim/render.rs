use super::{OnboardCamera, OverheadCamera, Pose, Scenario};
use crate::pathfind::WorldPoint;
use crate::vision::{GrayImage, OBSTACLE_INTENSITY, ROBOT_INTENSITY, TARGET_INTENSITY};

const LANE_INTENSITY: u8 = 255;

fn segment_distance(p: WorldPoint, a: WorldPoint, b: WorldPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(&WorldPoint::new(a.x + t * dx, a.y + t * dy))
}

/// Pinhole view of the floor tape from a camera on the robot, looking along
/// the heading and tilted down by the camera pitch.
///
/// Each pixel center is back-projected onto the ground plane and painted
/// white when it lands on tape. Tape narrower than a pixel's ground footprint
/// is widened to one pixel so distant lane lines stay connected.
pub fn render_onboard(pose: Pose, scenario: &Scenario, camera: &OnboardCamera) -> GrayImage {
    let (w, h) = (camera.width, camera.height);
    let mut img = GrayImage::new(w, h);
    if scenario.lanes.is_empty() {
        return img;
    }
    let (sp, cp) = camera.pitch_deg.to_radians().sin_cos();
    let (sh, ch) = pose.heading_deg.to_radians().sin_cos();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let f = camera.focal_px;
    let half_tape = scenario.lane_tape_width_cm / 2.0;
    for v in 0..h {
        let y = v as f64 - cy;
        let forward = f * cp - y * sp;
        let up = -f * sp - y * cp;
        if up >= 0.0 {
            continue;
        }
        // ground distance per unit of ray; one pixel sideways spans `t` cm
        let t = camera.mount_height_cm / -up;
        let ahead = t * forward;
        for u in 0..w {
            let lateral = t * (u as f64 - cx);
            if ahead.hypot(lateral) > camera.max_view_cm {
                continue;
            }
            let p = WorldPoint::new(
                pose.position.x + ahead * sh + lateral * ch,
                pose.position.y + ahead * ch - lateral * sh,
            );
            let reach = half_tape.max(t / 2.0);
            let on_tape = scenario
                .lanes
                .iter()
                .flat_map(|line| line.windows(2))
                .any(|seg| segment_distance(p, seg[0], seg[1]) <= reach);
            if on_tape {
                img.set(u, v, LANE_INTENSITY);
            }
        }
    }
    img
}

pub fn overhead_size(scenario: &Scenario, camera: &OverheadCamera) -> (usize, usize) {
    let s = camera.scale_px_per_cm;
    (
        (scenario.bounds.width * s).ceil() as usize,
        (scenario.bounds.height * s).ceil() as usize,
    )
}

/// World position of an overhead pixel coordinate (the v axis points down).
pub fn pixel_to_world(h: f64, v: f64, image_height: usize, camera: &OverheadCamera) -> WorldPoint {
    let s = camera.scale_px_per_cm;
    WorldPoint::new(h / s, (image_height as f64 - v) / s)
}

fn fill_disc(img: &mut GrayImage, center: WorldPoint, radius: f64, value: u8, camera: &OverheadCamera) {
    let s = camera.scale_px_per_cm;
    let img_h = img.height();
    let (ch, cv) = (center.x * s, img_h as f64 - center.y * s);
    let r = radius * s;
    let lo = |c: f64| (c - r).floor().max(0.0) as usize;
    let hi = |c: f64, n: usize| ((c + r).ceil().max(0.0) as usize).min(n.saturating_sub(1));
    for v in lo(cv)..=hi(cv, img_h) {
        for u in lo(ch)..=hi(ch, img.width()) {
            let (du, dv) = (u as f64 - ch, v as f64 - cv);
            if du * du + dv * dv <= r * r {
                img.set(u, v, value);
            }
        }
    }
}

/// Top-down orthographic view: obstacles, then the target marker, then the
/// robot marker, on a black background.
pub fn render_overhead(pose: Pose, scenario: &Scenario, camera: &OverheadCamera) -> GrayImage {
    let (w, h) = overhead_size(scenario, camera);
    let mut img = GrayImage::new(w, h);
    if w == 0 || h == 0 {
        return img;
    }
    for o in &scenario.obstacles {
        fill_disc(&mut img, o.center, o.radius, OBSTACLE_INTENSITY, camera);
    }
    fill_disc(
        &mut img,
        scenario.target.position,
        camera.marker_radius_cm,
        TARGET_INTENSITY,
        camera,
    );
    fill_disc(
        &mut img,
        pose.position,
        camera.marker_radius_cm,
        ROBOT_INTENSITY,
        camera,
    );
    img
}
