//! Deterministic 2D robot-navigation workbench.
//!
//! Lane keeping from a synthetic onboard camera, theta-based steering and
//! path planning, a Dijkstra comparison baseline, ultrasound obstacle
//! avoidance, a simulator that ties them together, and the line protocol
//! spoken between the planning workstation and the robot.

pub mod avoidance;
pub mod cli;
pub mod geometry;
pub mod net;
pub mod pathfind;
pub mod sim;
pub mod vision;

pub use geometry::{ImagePoint, Segment, SteerCommand, ThetaDeg};
pub use pathfind::WorldPoint;
