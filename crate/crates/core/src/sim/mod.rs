//! Deterministic 2D world: a square testbed with circular obstacles and
//! floor tape, a robot that turns in place at a fixed rate and drives
//! straight, a ray-cast ultrasound sensor, onboard and overhead camera
//! renders, and the mission loop that wires planning, driving and avoidance
//! together.

mod mission;
mod output;
mod render;
mod scenario;
mod sensor;
mod world;

use thiserror::Error;

use crate::avoidance::AvoidanceError;
use crate::geometry::GeometryError;
use crate::pathfind::PathfindError;
use crate::vision::VisionError;

pub use mission::{
    locate_markers, plan_initial_theta, run_from_theta, run_mission, trajectory_clear, MissionEvent, MissionReport,
    Outcome,
};
pub use output::{trajectory_csv, trajectory_svg, CSV_HEADER};
pub use render::{overhead_size, pixel_to_world, render_onboard, render_overhead};
pub use scenario::{
    Bounds, CameraModel, Circle, OnboardCamera, OverheadCamera, RobotStart, Scenario, SimParams, Target,
    TESTBED_SIDE_CM,
};
pub use sensor::{cast_ray, raycast_ultrasound};
pub use world::{apply_steer, drive_forward, free_travel, Phase, Pose, TrajectorySample, WorldState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario not found: {0}")]
    NotFound(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("marker detection failed: {0}")]
    Detection(#[from] VisionError),
    #[error(transparent)]
    Bearing(#[from] PathfindError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Avoidance(AvoidanceError),
}
