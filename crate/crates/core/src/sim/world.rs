use std::fmt;

use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::geometry::{normalize_deg, SteerCommand};
use crate::pathfind::WorldPoint;

/// Motion stops this far short of touching an obstacle or wall.
const CONTACT_GAP_CM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    TurningToTarget,
    DrivingStraight,
    Avoiding,
    Done,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::TurningToTarget => "TurningToTarget",
            Phase::DrivingStraight => "DrivingStraight",
            Phase::Avoiding => "Avoiding",
            Phase::Done => "Done",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: WorldPoint,
    /// Compass heading: 0 = north, clockwise positive, in `(-180, 180]`.
    pub heading_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t_s: f64,
    pub position: WorldPoint,
    pub heading_deg: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub pose: Pose,
    pub clock_s: f64,
    pub phase: Phase,
    pub trajectory: Vec<TrajectorySample>,
    /// Set when the last motion ended against an obstacle or wall.
    pub collided: bool,
}

impl WorldState {
    pub fn new(scenario: &Scenario) -> Self {
        let mut state = Self {
            pose: Pose {
                position: scenario.robot.position,
                heading_deg: normalize_deg(scenario.robot.heading_deg),
            },
            clock_s: 0.0,
            phase: Phase::TurningToTarget,
            trajectory: Vec::new(),
            collided: false,
        };
        state.log();
        state
    }

    pub fn log(&mut self) {
        self.trajectory.push(TrajectorySample {
            t_s: self.clock_s,
            position: self.pose.position,
            heading_deg: self.pose.heading_deg,
            phase: self.phase,
        });
    }

    pub fn set_phase(&mut self, phase: Phase) {
        if self.phase != phase {
            self.phase = phase;
            self.log();
        }
    }

    pub fn distance_to_target(&self, scenario: &Scenario) -> f64 {
        self.pose.position.distance(&scenario.target.position)
    }

    pub fn at_target(&self, scenario: &Scenario) -> bool {
        self.distance_to_target(scenario) <= scenario.target.radius
    }

    pub fn path_length(&self) -> f64 {
        self.trajectory
            .windows(2)
            .map(|w| w[0].position.distance(&w[1].position))
            .sum()
    }

    /// One turn-in-place tick of at most `dt` seconds toward `sign`.
    pub(crate) fn turn_tick(&mut self, sign: f64, seconds: f64, scenario: &Scenario) {
        self.pose.heading_deg = normalize_deg(self.pose.heading_deg + sign * scenario.params.turn_rate * seconds);
        self.clock_s += seconds;
        self.log();
    }

    /// One forward tick; returns false when motion was cut short by contact.
    pub(crate) fn drive_tick(&mut self, seconds: f64, scenario: &Scenario) -> bool {
        let want = scenario.params.forward_speed * seconds;
        let allowed = free_travel(self.pose, scenario).min(want);
        self.pose.position = self.pose.position.advanced(self.pose.heading_deg, allowed.max(0.0));
        self.clock_s += seconds;
        self.collided = allowed < want;
        self.log();
        !self.collided
    }
}

fn tick_lengths(total: f64, dt: f64) -> impl Iterator<Item = f64> {
    let full = (total / dt).floor() as usize;
    let rest = total - full as f64 * dt;
    std::iter::repeat_n(dt, full).chain((rest > 1e-12).then_some(rest))
}

/// Distance the robot can travel along its heading before its disc touches
/// an obstacle or leaves the world bounds.
pub fn free_travel(pose: Pose, scenario: &Scenario) -> f64 {
    let r = scenario.robot.radius;
    let p = pose.position;
    let (ux, uy) = pose.heading_deg.to_radians().sin_cos();
    let mut best = f64::INFINITY;
    for o in &scenario.obstacles {
        let reach = o.radius + r;
        let (fx, fy) = (p.x - o.center.x, p.y - o.center.y);
        let b = fx * ux + fy * uy;
        let c = fx * fx + fy * fy - reach * reach;
        if c <= 0.0 {
            // already touching: only motion away from the obstacle is free
            if b < 0.0 {
                best = 0.0;
            }
            continue;
        }
        let disc = b * b - c;
        if b >= 0.0 || disc < 0.0 {
            continue;
        }
        let t = -b - disc.sqrt();
        best = best.min((t - CONTACT_GAP_CM).max(0.0));
    }
    let wall = |pos: f64, dir: f64, max: f64| -> f64 {
        if dir > 1e-12 {
            ((max - r - pos) / dir - CONTACT_GAP_CM).max(0.0)
        } else if dir < -1e-12 {
            ((pos - r) / -dir - CONTACT_GAP_CM).max(0.0)
        } else {
            f64::INFINITY
        }
    };
    best = best.min(wall(p.x, ux, scenario.bounds.width));
    best.min(wall(p.y, uy, scenario.bounds.height))
}

/// Turns in place at the scenario turn rate in `dt` ticks, the last tick
/// partial so the commanded duration is met exactly.
pub fn apply_steer(mut state: WorldState, cmd: &SteerCommand, scenario: &Scenario) -> WorldState {
    steer_in_place(&mut state, cmd, scenario);
    state
}

pub(crate) fn steer_in_place(state: &mut WorldState, cmd: &SteerCommand, scenario: &Scenario) {
    let signed = cmd.signed_turn_deg(1.0);
    if signed == 0.0 || cmd.duration_s <= 0.0 {
        return;
    }
    for seconds in tick_lengths(cmd.duration_s, scenario.params.dt) {
        state.turn_tick(signed.signum(), seconds, scenario);
    }
}

/// Drives straight for `duration_s`, halting at first contact with the
/// `collided` flag set.
pub fn drive_forward(mut state: WorldState, duration_s: f64, scenario: &Scenario) -> WorldState {
    state.collided = false;
    for seconds in tick_lengths(duration_s.max(0.0), scenario.params.dt) {
        if !state.drive_tick(seconds, scenario) {
            break;
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{steer_from_theta, ThetaDeg};
    use crate::sim::{Bounds, Circle};

    fn open(heading: f64) -> Scenario {
        Scenario::open_field(
            Bounds {
                width: 1000.0,
                height: 1000.0,
            },
            WorldPoint::new(500.0, 200.0),
            heading,
            WorldPoint::new(500.0, 800.0),
        )
    }

    #[test]
    fn ninety_degree_turn_timing() {
        let s = open(0.0);
        let cmd = steer_from_theta(ThetaDeg::new(90.0).unwrap());
        let st = apply_steer(WorldState::new(&s), &cmd, &s);
        assert!((st.pose.heading_deg - 90.0).abs() < 0.5);
        assert!((st.clock_s - 90.0 / 23.0).abs() < 1e-9);
        assert!((st.clock_s - 3.913).abs() < 0.05);
        assert_eq!(st.pose.position, s.robot.position);
    }

    #[test]
    fn zero_turn_is_noop() {
        let s = open(0.0);
        let st = apply_steer(WorldState::new(&s), &steer_from_theta(ThetaDeg::ZERO), &s);
        assert_eq!(st.pose, WorldState::new(&s).pose);
        assert_eq!(st.clock_s, 0.0);
    }

    #[test]
    fn opposite_turns_cancel() {
        let s = open(10.0);
        let st = apply_steer(WorldState::new(&s), &steer_from_theta(ThetaDeg::new(45.0).unwrap()), &s);
        let st = apply_steer(st, &steer_from_theta(ThetaDeg::new(-45.0).unwrap()), &s);
        assert!((st.pose.heading_deg - 10.0).abs() < 0.5);
    }

    #[test]
    fn drive_north_five_seconds() {
        let s = open(0.0);
        let st = drive_forward(WorldState::new(&s), 5.0, &s);
        assert!((st.pose.position.y - 300.0).abs() < 1e-9);
        assert!((st.pose.position.x - 500.0).abs() < 1e-9);
        assert!(!st.collided);
        let st = drive_forward(WorldState::new(&s), 0.0, &s);
        assert_eq!(st.pose.position, s.robot.position);
    }

    #[test]
    fn halts_at_obstacle_contact() {
        let mut s = open(0.0);
        s.obstacles.push(Circle {
            center: WorldPoint::new(500.0, 250.0),
            radius: 10.0,
        });
        let st = drive_forward(WorldState::new(&s), 10.0, &s);
        assert!(st.collided);
        // centers 50 apart, radii 10 + 10: contact after 30 cm
        assert!((st.pose.position.y - 230.0).abs() < 1e-5);
        assert!(st.pose.position.distance(&WorldPoint::new(500.0, 250.0)) >= 20.0);
    }

    #[test]
    fn halts_at_wall() {
        let s = open(90.0);
        let st = drive_forward(WorldState::new(&s), 100.0, &s);
        assert!(st.collided);
        assert!((st.pose.position.x - 990.0).abs() < 1e-5);
    }

    #[test]
    fn leaving_contact_is_allowed() {
        let mut s = open(180.0);
        s.obstacles.push(Circle {
            center: WorldPoint::new(500.0, 220.0),
            radius: 10.0,
        });
        let st = drive_forward(WorldState::new(&s), 1.0, &s);
        assert!(!st.collided);
        assert!((st.pose.position.y - 180.0).abs() < 1e-9);
    }
}
