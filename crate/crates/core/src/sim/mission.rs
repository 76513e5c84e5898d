use std::fmt;

use serde::{Deserialize, Serialize};

use super::render::{pixel_to_world, render_overhead};
use super::sensor::raycast_ultrasound;
use super::world::{steer_in_place, Phase, TrajectorySample, WorldState};
use super::{Scenario, SimError};
use crate::avoidance::{
    fsm_step, resume_heading, Action, AvoidanceError, AvoidanceState, Mode, RangeReading, Transcript,
};
use crate::geometry::{steer_with_rate, ThetaDeg};
use crate::pathfind::{theta_to_target, WorldPoint};
use crate::vision::{detect_blobs, MarkerLabel};

/// A stall episode must bring the robot at least this much closer.
const PROGRESS_EPS_CM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Done,
    Trapped,
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Done => "done",
            Outcome::Trapped => "trapped",
            Outcome::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MissionEvent {
    /// Range reading that tripped the obstacle threshold.
    ObstacleDetected {
        t_s: f64,
        distance_cm: f64,
    },
    TargetFound {
        t_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionReport {
    pub outcome: Outcome,
    pub elapsed_s: f64,
    pub path_length_cm: f64,
    pub final_distance_cm: f64,
    /// Stands in for the robot's LED flash and sound on arrival.
    pub signaled: bool,
    pub initial_theta: ThetaDeg,
    pub trajectory: Vec<TrajectorySample>,
    pub transcript: Transcript,
    pub events: Vec<MissionEvent>,
}

/// Robot and target positions as seen by the overhead camera.
pub fn locate_markers(scenario: &Scenario, state: &WorldState) -> Result<(WorldPoint, WorldPoint), SimError> {
    let cam = &scenario.camera.overhead;
    let img = render_overhead(state.pose, scenario, cam);
    let blobs = detect_blobs(&img, cam.min_blob_pixels)?;
    let find = |label| {
        let b = blobs
            .iter()
            .find(|b| b.label == label)
            .expect("detect_blobs returns both markers");
        pixel_to_world(b.centroid.h, b.centroid.v, img.height(), cam)
    };
    Ok((find(MarkerLabel::Robot), find(MarkerLabel::Target)))
}

/// Initial turn toward the target: overhead render, marker detection,
/// back-projection, then the straight-line bearing from the known heading.
pub fn plan_initial_theta(scenario: &Scenario) -> Result<ThetaDeg, SimError> {
    let state = WorldState::new(scenario);
    let (robot, target) = locate_markers(scenario, &state)?;
    Ok(theta_to_target(robot, state.pose.heading_deg, target)?)
}

pub fn run_mission(scenario: &Scenario) -> Result<MissionReport, SimError> {
    let theta = plan_initial_theta(scenario)?;
    run_from_theta(scenario, theta, &mut |_| {})
}

/// Executes the mission after the initial theta is known, reporting events
/// to `observer` as they happen.
pub fn run_from_theta(
    scenario: &Scenario,
    theta: ThetaDeg,
    observer: &mut dyn FnMut(&MissionEvent),
) -> Result<MissionReport, SimError> {
    scenario.validate()?;
    let mut run = Run {
        scenario,
        state: WorldState::new(scenario),
        transcript: Transcript::new(),
        events: Vec::new(),
        observer,
    };
    let outcome = run.execute(theta)?;
    let Run {
        state,
        transcript,
        events,
        ..
    } = run;
    Ok(MissionReport {
        outcome,
        elapsed_s: state.clock_s,
        path_length_cm: state.path_length(),
        final_distance_cm: state.distance_to_target(scenario),
        signaled: outcome == Outcome::Done,
        initial_theta: theta,
        trajectory: state.trajectory,
        transcript,
        events,
    })
}

struct Run<'a> {
    scenario: &'a Scenario,
    state: WorldState,
    transcript: Transcript,
    events: Vec<MissionEvent>,
    observer: &'a mut dyn FnMut(&MissionEvent),
}

/// Why a driving stretch ended.
enum Stop {
    Arrived,
    Blocked(RangeReading),
    Finished,
    OutOfTime,
}

enum Episode {
    /// The FSM finished clearing and hands control back to target seeking.
    Resume(AvoidanceState),
    End(Outcome),
}

impl Run<'_> {
    fn emit(&mut self, event: MissionEvent) {
        (self.observer)(&event);
        self.events.push(event);
    }

    fn timed_out(&self) -> bool {
        self.state.clock_s >= self.scenario.params.timeout_s
    }

    fn turn(&mut self, theta: ThetaDeg) {
        let cmd = steer_with_rate(theta, self.scenario.params.turn_rate);
        steer_in_place(&mut self.state, &cmd, self.scenario);
    }

    fn reading(&self) -> RangeReading {
        raycast_ultrasound(self.state.pose, self.scenario)
    }

    /// Contact without a ray hit still stops the robot; it reads as an
    /// obstacle at the robot's own radius.
    fn bump(&self) -> RangeReading {
        RangeReading::new(self.scenario.robot.radius, self.scenario.params.sensor_max_range)
    }

    /// Drives in `dt` ticks, polling the sensor before each tick, until the
    /// target is reached, the path is blocked, or `limit_cm` is covered.
    fn drive(&mut self, limit_cm: Option<f64>) -> Stop {
        let p = &self.scenario.params;
        let mut remaining_s = limit_cm.map(|d| d / p.forward_speed);
        loop {
            if self.state.at_target(self.scenario) {
                return Stop::Arrived;
            }
            if self.timed_out() {
                return Stop::OutOfTime;
            }
            if remaining_s.is_some_and(|r| r <= 1e-12) {
                return Stop::Finished;
            }
            let reading = self.reading();
            if reading.distance_cm < p.obstacle_threshold {
                return Stop::Blocked(reading);
            }
            let tick = remaining_s.map_or(p.dt, |r| r.min(p.dt));
            if let Some(r) = remaining_s.as_mut() {
                *r -= tick;
            }
            if !self.state.drive_tick(tick, self.scenario) {
                return Stop::Blocked(self.bump());
            }
        }
    }

    fn execute(&mut self, theta: ThetaDeg) -> Result<Outcome, SimError> {
        let target = self.scenario.target.position;
        self.state.set_phase(Phase::TurningToTarget);
        self.turn(theta);
        self.state.set_phase(Phase::DrivingStraight);

        let mut best = self.state.distance_to_target(self.scenario);
        let mut stalled = 0;
        loop {
            let reading = match self.drive(None) {
                Stop::Arrived => return Ok(self.arrive()),
                Stop::OutOfTime => return Ok(Outcome::Timeout),
                Stop::Blocked(r) => r,
                Stop::Finished => unreachable!("unbounded drive"),
            };
            let here = self.state.distance_to_target(self.scenario);
            if here < best - PROGRESS_EPS_CM {
                best = here;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= self.scenario.params.stall_episodes {
                    return Ok(Outcome::Trapped);
                }
            }
            self.emit(MissionEvent::ObstacleDetected {
                t_s: self.state.clock_s,
                distance_cm: reading.distance_cm,
            });
            self.state.set_phase(Phase::Avoiding);
            match self.avoid(reading)? {
                Episode::End(outcome) => return Ok(outcome),
                Episode::Resume(fsm) => {
                    let pose = self.state.pose;
                    let theta =
                        resume_heading(&fsm, pose.position, pose.heading_deg, target).map_err(SimError::Avoidance)?;
                    self.state.set_phase(Phase::TurningToTarget);
                    self.turn(theta);
                    self.state.set_phase(Phase::DrivingStraight);
                }
            }
        }
    }

    fn avoid(&mut self, first: RangeReading) -> Result<Episode, SimError> {
        let config = self.scenario.params.avoidance();
        let target = self.scenario.target.position;
        let mut fsm = AvoidanceState::default();
        let mut reading = first;
        loop {
            if self.timed_out() {
                return Ok(Episode::End(Outcome::Timeout));
            }
            let pose = self.state.pose;
            let target_theta = theta_to_target(pose.position, pose.heading_deg, target)?;
            let (next, action) = match fsm_step(fsm, reading, target_theta, &config) {
                Ok(step) => step,
                Err(AvoidanceError::Trapped { .. }) => return Ok(Episode::End(Outcome::Trapped)),
                Err(e) => return Err(SimError::Avoidance(e)),
            };
            self.transcript
                .record(self.state.clock_s, next.mode, reading.distance_cm, action);
            fsm = next;
            match action {
                Action::Turn(deg) => {
                    self.turn(ThetaDeg::new(deg)?);
                    reading = self.reading();
                }
                Action::DriveForward => {
                    debug_assert_eq!(fsm.mode, Mode::Clearing);
                    reading = match self.drive(Some(config.clearance_cm)) {
                        Stop::Arrived => return Ok(Episode::End(self.arrive())),
                        Stop::OutOfTime => return Ok(Episode::End(Outcome::Timeout)),
                        Stop::Blocked(r) => r,
                        Stop::Finished => self.reading(),
                    };
                }
                Action::ResumeTarget => return Ok(Episode::Resume(fsm)),
            }
        }
    }

    fn arrive(&mut self) -> Outcome {
        self.state.set_phase(Phase::Done);
        self.emit(MissionEvent::TargetFound {
            t_s: self.state.clock_s,
        });
        Outcome::Done
    }
}

/// True when no logged position overlaps an obstacle disc.
pub fn trajectory_clear(trajectory: &[TrajectorySample], scenario: &Scenario) -> bool {
    let r = scenario.robot.radius;
    trajectory.iter().all(|s| {
        scenario
            .obstacles
            .iter()
            .all(|o| s.position.distance(&o.center) >= o.radius + r - 1e-9)
    })
}
