//! Ultrasound obstacle avoidance.
//!
//! The robot drives forward until the range reading drops below the
//! threshold, then probes rightward in 30 degree steps up to 90 degrees,
//! swings 120 degrees left, probes leftward the same way, swings back, and
//! repeats. The first clear probe is driven for a clearance distance, after
//! which control returns to target seeking.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ThetaDeg;
use crate::pathfind::{theta_to_target, PathfindError, WorldPoint};

pub const OBSTACLE_THRESHOLD_CM: f64 = 30.0;
pub const SWEEP_STEP_DEG: f64 = 30.0;
pub const SWING_DEG: f64 = 120.0;
pub const SWEEP_STEPS: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AvoidanceError {
    #[error("invalid range reading {distance} cm (max range {max_range} cm)")]
    Sensor { distance: f64, max_range: f64 },
    #[error("trapped: no clear heading after {cycles} full sweep cycles")]
    Trapped { cycles: u32 },
    #[error("cannot resume before clearing completes (mode {0})")]
    NotCleared(Mode),
    #[error(transparent)]
    Bearing(#[from] PathfindError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeReading {
    pub distance_cm: f64,
    /// A reading equal to this means nothing was detected.
    pub max_range: f64,
}

impl RangeReading {
    pub fn new(distance_cm: f64, max_range: f64) -> Self {
        Self { distance_cm, max_range }
    }

    fn validate(&self) -> Result<(), AvoidanceError> {
        let ok = self.distance_cm.is_finite() && self.distance_cm > 0.0 && self.distance_cm <= self.max_range;
        if ok {
            Ok(())
        } else {
            Err(AvoidanceError::Sensor {
                distance: self.distance_cm,
                max_range: self.max_range,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Forward,
    SweepRight(u8),
    SweepLeft(u8),
    Clearing,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Forward => f.write_str("Forward"),
            Mode::SweepRight(k) => write!(f, "SweepRight({k})"),
            Mode::SweepLeft(k) => write!(f, "SweepLeft({k})"),
            Mode::Clearing => f.write_str("Clearing"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Action {
    DriveForward,
    /// Relative turn in degrees, positive right.
    Turn(f64),
    ResumeTarget,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::DriveForward => f.write_str("DriveForward"),
            Action::Turn(deg) => write!(f, "Turn({deg:+.0})"),
            Action::ResumeTarget => f.write_str("ResumeTarget"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceConfig {
    pub threshold_cm: f64,
    /// Distance driven on a clear heading before re-aiming at the target.
    pub clearance_cm: f64,
    /// Full right+left sweep cycles tolerated before giving up.
    pub cycle_limit: u32,
}

impl Default for AvoidanceConfig {
    fn default() -> Self {
        Self {
            threshold_cm: OBSTACLE_THRESHOLD_CM,
            clearance_cm: 40.0,
            cycle_limit: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceState {
    pub mode: Mode,
    /// Target theta captured when the obstacle was first detected.
    pub saved_target_theta: Option<ThetaDeg>,
    /// Heading offset from where the obstacle was first detected, degrees.
    pub scan_offset_deg: f64,
    /// Completed full sweep cycles in the current episode.
    pub cycles: u32,
}

impl Default for AvoidanceState {
    fn default() -> Self {
        Self {
            mode: Mode::Forward,
            saved_target_theta: None,
            scan_offset_deg: 0.0,
            cycles: 0,
        }
    }
}

impl AvoidanceState {
    fn turned(self, mode: Mode, deg: f64) -> (AvoidanceState, Action) {
        (
            AvoidanceState {
                mode,
                scan_offset_deg: self.scan_offset_deg + deg,
                ..self
            },
            Action::Turn(deg),
        )
    }
}

/// One transition. `target_theta` is the current turn toward the target and
/// is only recorded when leaving `Forward`.
pub fn fsm_step(
    state: AvoidanceState,
    reading: RangeReading,
    target_theta: ThetaDeg,
    config: &AvoidanceConfig,
) -> Result<(AvoidanceState, Action), AvoidanceError> {
    reading.validate()?;
    let blocked = reading.distance_cm < config.threshold_cm;
    let next = match (state.mode, blocked) {
        (Mode::Forward, false) => (state, Action::DriveForward),
        (Mode::Forward, true) => {
            let fresh = AvoidanceState {
                mode: Mode::Forward,
                saved_target_theta: Some(target_theta),
                scan_offset_deg: 0.0,
                cycles: 0,
            };
            fresh.turned(Mode::SweepRight(1), SWEEP_STEP_DEG)
        }
        (Mode::SweepRight(k), true) if k < SWEEP_STEPS => state.turned(Mode::SweepRight(k + 1), SWEEP_STEP_DEG),
        (Mode::SweepRight(_), true) => state.turned(Mode::SweepLeft(1), -SWING_DEG),
        (Mode::SweepLeft(k), true) if k < SWEEP_STEPS => state.turned(Mode::SweepLeft(k + 1), -SWEEP_STEP_DEG),
        (Mode::SweepLeft(_), true) => {
            let cycles = state.cycles + 1;
            if cycles >= config.cycle_limit {
                return Err(AvoidanceError::Trapped { cycles });
            }
            AvoidanceState { cycles, ..state }.turned(Mode::SweepRight(1), SWING_DEG)
        }
        (Mode::SweepRight(_) | Mode::SweepLeft(_), false) => (
            AvoidanceState {
                mode: Mode::Clearing,
                ..state
            },
            Action::DriveForward,
        ),
        // blocked again while clearing: probe afresh from the current heading
        (Mode::Clearing, true) => AvoidanceState {
            scan_offset_deg: 0.0,
            ..state
        }
        .turned(Mode::SweepRight(1), SWEEP_STEP_DEG),
        (Mode::Clearing, false) => (
            AvoidanceState {
                mode: Mode::Forward,
                scan_offset_deg: 0.0,
                cycles: 0,
                ..state
            },
            Action::ResumeTarget,
        ),
    };
    Ok(next)
}

/// Turn that faces the target again from the current pose, once clearing has
/// finished. The bearing is recomputed because the robot has moved.
pub fn resume_heading(
    state: &AvoidanceState,
    robot: WorldPoint,
    heading_deg: f64,
    target: WorldPoint,
) -> Result<ThetaDeg, AvoidanceError> {
    if !matches!(state.mode, Mode::Clearing | Mode::Forward) {
        return Err(AvoidanceError::NotCleared(state.mode));
    }
    Ok(theta_to_target(robot, heading_deg, target)?)
}

/// Action transcript, one `t_s mode distance_cm action` line per step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    text: String,
    actions: Vec<Action>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, t_s: f64, mode: Mode, distance_cm: f64, action: Action) {
        let _ = writeln!(self.text, "{t_s:.3} {mode} {distance_cm:.1} {action}");
        self.actions.push(action);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Feeds `readings` through the FSM from `Forward`, one step per second of
/// transcript time, stopping early on error.
pub fn replay(
    readings: &[f64],
    max_range: f64,
    config: &AvoidanceConfig,
) -> (Transcript, Result<AvoidanceState, AvoidanceError>) {
    let mut transcript = Transcript::new();
    let mut state = AvoidanceState::default();
    for (i, &d) in readings.iter().enumerate() {
        match fsm_step(state, RangeReading::new(d, max_range), ThetaDeg::ZERO, config) {
            Ok((next, action)) => {
                transcript.record(i as f64, next.mode, d, action);
                state = next;
            }
            Err(e) => return (transcript, Err(e)),
        }
    }
    (transcript, Ok(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn step(mode: Mode, d: f64) -> (AvoidanceState, Action) {
        let state = AvoidanceState {
            mode,
            ..Default::default()
        };
        fsm_step(
            state,
            RangeReading::new(d, 400.0),
            ThetaDeg::ZERO,
            &AvoidanceConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(step(Mode::Forward, 100.0).0.mode, Mode::Forward);
        assert_eq!(step(Mode::Forward, 100.0).1, Action::DriveForward);
        let (s, a) = step(Mode::Forward, 25.0);
        assert_eq!((s.mode, a), (Mode::SweepRight(1), Action::Turn(30.0)));
        let (s, a) = step(Mode::SweepRight(3), 25.0);
        assert_eq!((s.mode, a), (Mode::SweepLeft(1), Action::Turn(-120.0)));
        let (s, a) = step(Mode::SweepRight(2), 200.0);
        assert_eq!((s.mode, a), (Mode::Clearing, Action::DriveForward));
        let (s, a) = step(Mode::Clearing, 200.0);
        assert_eq!((s.mode, a), (Mode::Forward, Action::ResumeTarget));
    }

    #[test]
    fn boundary_reading_is_clear() {
        assert_eq!(step(Mode::Forward, 30.0).1, Action::DriveForward);
    }

    #[test]
    fn saves_target_theta_on_detection() {
        let theta = ThetaDeg::new(-12.5).unwrap();
        let (s, _) = fsm_step(
            AvoidanceState::default(),
            RangeReading::new(10.0, 400.0),
            theta,
            &AvoidanceConfig::default(),
        )
        .unwrap();
        assert_eq!(s.saved_target_theta, Some(theta));
        // later steps keep the first saved value
        let (s, _) = fsm_step(
            s,
            RangeReading::new(10.0, 400.0),
            ThetaDeg::ZERO,
            &AvoidanceConfig::default(),
        )
        .unwrap();
        assert_eq!(s.saved_target_theta, Some(theta));
    }

    #[test]
    fn invalid_readings() {
        for d in [0.0, -3.0, f64::NAN, 401.0] {
            assert!(matches!(
                fsm_step(
                    AvoidanceState::default(),
                    RangeReading::new(d, 400.0),
                    ThetaDeg::ZERO,
                    &AvoidanceConfig::default()
                ),
                Err(AvoidanceError::Sensor { .. })
            ));
        }
    }

    #[test]
    fn always_blocked_is_periodic_then_trapped() {
        let cfg = AvoidanceConfig {
            cycle_limit: 5,
            ..Default::default()
        };
        let (t, end) = replay(&[10.0; 40], 400.0, &cfg);
        assert_eq!(end, Err(AvoidanceError::Trapped { cycles: 5 }));
        let turns: Vec<f64> = t
            .actions()
            .iter()
            .map(|a| match a {
                Action::Turn(d) => *d,
                other => panic!("unexpected {other}"),
            })
            .collect();
        assert_eq!(&turns[..7], &[30.0, 30.0, 30.0, -120.0, -30.0, -30.0, 120.0]);
        let period = &turns[1..7];
        for chunk in turns[1..].chunks_exact(6) {
            assert_eq!(chunk, period);
        }
    }

    #[test]
    fn right_sweep_then_swing_nets_minus_30() {
        let (t, _) = replay(&[10.0; 4], 400.0, &AvoidanceConfig::default());
        let net: f64 = t
            .actions()
            .iter()
            .map(|a| if let Action::Turn(d) = a { *d } else { 0.0 })
            .sum();
        assert_eq!(net, -30.0);
    }

    #[test]
    fn transcript_line_format() {
        let (t, _) = replay(&[100.0, 25.0], 400.0, &AvoidanceConfig::default());
        assert_eq!(
            t.as_str(),
            "0.000 Forward 100.0 DriveForward\n1.000 SweepRight(1) 25.0 Turn(+30)\n"
        );
    }

    #[test]
    fn resume_recomputes_bearing() {
        let state = AvoidanceState {
            mode: Mode::Clearing,
            ..Default::default()
        };
        // displaced 50 cm right of the original line, target 300 cm ahead
        let theta = resume_heading(&state, WorldPoint::new(50.0, 0.0), 0.0, WorldPoint::new(0.0, 300.0)).unwrap();
        let analytic = -(50.0f64 / 300.0).atan().to_degrees();
        assert!((theta.value() - analytic).abs() < 0.01);
        let theta = resume_heading(&state, WorldPoint::new(0.0, 0.0), 0.0, WorldPoint::new(0.0, 300.0)).unwrap();
        assert_eq!(theta.value(), 0.0);
        let theta = resume_heading(&state, WorldPoint::new(0.0, 0.0), 0.0, WorldPoint::new(0.0, -300.0)).unwrap();
        assert_eq!(theta.value(), 180.0);
        let sweeping = AvoidanceState {
            mode: Mode::SweepLeft(2),
            ..Default::default()
        };
        assert!(resume_heading(&sweeping, WorldPoint::new(0.0, 0.0), 0.0, WorldPoint::new(0.0, 3.0)).is_err());
    }

    proptest! {
        #[test]
        fn clear_reading_never_turns(mode_pick in 0u8..8, d in 30.0f64..400.0) {
            let mode = match mode_pick {
                0 => Mode::Forward,
                1..=3 => Mode::SweepRight(mode_pick),
                4..=6 => Mode::SweepLeft(mode_pick - 3),
                _ => Mode::Clearing,
            };
            let (_, a) = step(mode, d);
            prop_assert!(!matches!(a, Action::Turn(_)));
        }

        #[test]
        fn offset_bounded_and_deterministic(readings in prop::collection::vec(prop_oneof![1.0f64..29.9, 30.0f64..400.0], 1..60)) {
            let cfg = AvoidanceConfig { cycle_limit: 1000, ..Default::default() };
            let mut state = AvoidanceState::default();
            for &d in &readings {
                let (next, _) = fsm_step(state, RangeReading::new(d, 400.0), ThetaDeg::ZERO, &cfg).unwrap();
                prop_assert!(next.scan_offset_deg.abs() <= 90.0);
                state = next;
            }
            let (a, _) = replay(&readings, 400.0, &cfg);
            let (b, _) = replay(&readings, 400.0, &cfg);
            prop_assert_eq!(a, b);
        }
    }
}
