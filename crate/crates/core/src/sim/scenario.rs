use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::avoidance::AvoidanceConfig;
use crate::geometry::TURN_RATE_DEG_PER_S;
use crate::pathfind::WorldPoint;

/// 10 ft square testbed, in cm.
pub const TESTBED_SIDE_CM: f64 = 304.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            width: TESTBED_SIDE_CM,
            height: TESTBED_SIDE_CM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: WorldPoint,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotStart {
    pub position: WorldPoint,
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default = "defaults::robot_radius")]
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub position: WorldPoint,
    #[serde(default = "defaults::target_radius")]
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub forward_speed: f64,
    pub turn_rate: f64,
    pub sensor_max_range: f64,
    pub obstacle_threshold: f64,
    pub dt: f64,
    /// Ray offsets from the heading, degrees.
    pub sensor_cone_deg: Vec<f64>,
    pub clearance_cm: f64,
    pub cycle_limit: u32,
    pub timeout_s: f64,
    /// Consecutive avoidance episodes without getting closer to the target
    /// before the mission is declared trapped.
    pub stall_episodes: u32,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            forward_speed: 20.0,
            turn_rate: TURN_RATE_DEG_PER_S,
            sensor_max_range: 400.0,
            obstacle_threshold: 30.0,
            dt: 0.05,
            sensor_cone_deg: vec![-10.0, 0.0, 10.0],
            clearance_cm: 40.0,
            cycle_limit: 3,
            timeout_s: 600.0,
            stall_episodes: 12,
        }
    }
}

impl SimParams {
    pub fn avoidance(&self) -> AvoidanceConfig {
        AvoidanceConfig {
            threshold_cm: self.obstacle_threshold,
            clearance_cm: self.clearance_cm,
            cycle_limit: self.cycle_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnboardCamera {
    pub width: usize,
    pub height: usize,
    pub mount_height_cm: f64,
    pub focal_px: f64,
    /// Downward tilt of the optical axis.
    pub pitch_deg: f64,
    /// Ground farther than this is not rendered.
    pub max_view_cm: f64,
}

impl Default for OnboardCamera {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            mount_height_cm: 30.0,
            focal_px: 160.0,
            pitch_deg: 35.0,
            max_view_cm: 400.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OverheadCamera {
    pub scale_px_per_cm: f64,
    /// Radius of the robot and target markers in the render.
    pub marker_radius_cm: f64,
    pub min_blob_pixels: usize,
}

impl Default for OverheadCamera {
    fn default() -> Self {
        Self {
            scale_px_per_cm: 1.0,
            marker_radius_cm: 6.0,
            min_blob_pixels: crate::vision::DEFAULT_MIN_BLOB_PIXELS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraModel {
    pub onboard: OnboardCamera,
    pub overhead: OverheadCamera,
}

/// Static description of a run. Units are cm, degrees and seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub obstacles: Vec<Circle>,
    /// Floor tape polylines seen by the onboard camera.
    #[serde(default)]
    pub lanes: Vec<Vec<WorldPoint>>,
    #[serde(default = "defaults::tape_width")]
    pub lane_tape_width_cm: f64,
    pub robot: RobotStart,
    pub target: Target,
    #[serde(default)]
    pub params: SimParams,
    #[serde(default)]
    pub camera: CameraModel,
}

mod defaults {
    pub fn robot_radius() -> f64 {
        10.0
    }
    pub fn target_radius() -> f64 {
        15.0
    }
    pub fn tape_width() -> f64 {
        3.0
    }
}

impl Scenario {
    /// Empty testbed with the robot at `start` facing `heading_deg`.
    pub fn open_field(bounds: Bounds, start: WorldPoint, heading_deg: f64, target: WorldPoint) -> Self {
        Self {
            name: String::new(),
            bounds,
            obstacles: Vec::new(),
            lanes: Vec::new(),
            lane_tape_width_cm: defaults::tape_width(),
            robot: RobotStart {
                position: start,
                heading_deg,
                radius: defaults::robot_radius(),
            },
            target: Target {
                position: target,
                radius: defaults::target_radius(),
            },
            params: SimParams::default(),
            camera: CameraModel::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| SimError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                SimError::NotFound(path.display().to_string())
            } else {
                SimError::Io(format!("{}: {e}", path.display()))
            }
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |m: String| Err(SimError::InvalidScenario(m));
        let p = &self.params;
        let positive = [
            ("bounds.width", self.bounds.width),
            ("bounds.height", self.bounds.height),
            ("params.forward_speed", p.forward_speed),
            ("params.turn_rate", p.turn_rate),
            ("params.sensor_max_range", p.sensor_max_range),
            ("params.obstacle_threshold", p.obstacle_threshold),
            ("params.dt", p.dt),
            ("params.clearance_cm", p.clearance_cm),
            ("params.timeout_s", p.timeout_s),
            ("robot.radius", self.robot.radius),
            ("target.radius", self.target.radius),
            ("lane_tape_width_cm", self.lane_tape_width_cm),
            ("camera.onboard.focal_px", self.camera.onboard.focal_px),
            ("camera.onboard.mount_height_cm", self.camera.onboard.mount_height_cm),
            ("camera.overhead.scale_px_per_cm", self.camera.overhead.scale_px_per_cm),
            (
                "camera.overhead.marker_radius_cm",
                self.camera.overhead.marker_radius_cm,
            ),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return invalid(format!("{name} must be positive, got {value}"));
            }
        }
        if p.sensor_cone_deg.is_empty() {
            return invalid("params.sensor_cone_deg needs at least one ray".into());
        }
        if p.cycle_limit == 0 {
            return invalid("params.cycle_limit must be at least 1".into());
        }
        if self.camera.onboard.width < 5 || self.camera.onboard.height < 5 {
            return invalid("onboard camera must be at least 5x5 px".into());
        }
        for o in &self.obstacles {
            if o.radius.is_nan() || o.radius <= 0.0 {
                return invalid(format!("obstacle at {} has non-positive radius", o.center));
            }
        }
        let r = self.robot.radius;
        let pos = self.robot.position;
        if pos.x < r || pos.y < r || pos.x > self.bounds.width - r || pos.y > self.bounds.height - r {
            return invalid(format!("robot start {pos} is outside the bounds"));
        }
        let t = self.target.position;
        if t.x < 0.0 || t.y < 0.0 || t.x > self.bounds.width || t.y > self.bounds.height {
            return invalid(format!("target {t} is outside the bounds"));
        }
        for o in &self.obstacles {
            if o.center.distance(&pos) < o.radius + r {
                return invalid(format!("robot start overlaps obstacle at {}", o.center));
            }
            if o.center.distance(&t) < o.radius {
                return invalid(format!("target lies inside obstacle at {}", o.center));
            }
        }
        Ok(())
    }
}
