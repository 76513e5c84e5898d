//! Straight-line theta planning, an occupancy-grid Dijkstra baseline, and a
//! comparator that measures both.

mod compare;
mod dijkstra;
mod grid;
mod theta;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare_planners, ComparisonReport, PlannerStats};
pub use dijkstra::dijkstra;
pub use grid::{Cell, OccupancyGrid};
pub use theta::{theta_plan, theta_to_target, THETA_PLAN_OPS};

/// World coordinate in centimeters; `x` east, `y` north.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point `dist` along compass heading `heading_deg` (0 = north, clockwise).
    pub fn advanced(&self, heading_deg: f64, dist: f64) -> WorldPoint {
        let (s, c) = heading_deg.to_radians().sin_cos();
        WorldPoint::new(self.x + dist * s, self.y + dist * c)
    }
}

impl fmt::Display for WorldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.2}, {:.2})", self.x, self.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathfindError {
    #[error("robot and target coincide at {0}: bearing undefined")]
    ZeroLengthBearing(WorldPoint),
    #[error("cell ({}, {}) is outside the grid", .0.col, .0.row)]
    OutOfBounds(Cell),
    #[error("cell ({}, {}) is blocked", .0.col, .0.row)]
    BlockedEndpoint(Cell),
    #[error("goal ({}, {}) unreachable from ({}, {})", goal.col, goal.row, from.col, from.row)]
    Unreachable { from: Cell, goal: Cell },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid parse error at line {line}: {message}")]
    GridParse { line: usize, message: String },
    #[error("trials must be at least 1")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub path: Vec<WorldPoint>,
    /// Sum of step lengths, cm.
    pub cost: f64,
    /// Elementary-operation count; deterministic for identical inputs.
    pub ops: u64,
    pub wall_time_s: f64,
}
