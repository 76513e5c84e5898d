use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use super::session::{Direction, OrderingCheck, Role, SessionLog, SessionState};
use super::{decode, encode, NetError, WireMessage};
use crate::geometry::ThetaDeg;
use crate::sim::{run_from_theta, MissionEvent, MissionReport, Outcome, Scenario};

/// Status the robot reports while it executes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobotStatus {
    Range(f64),
    LaneLost,
    TargetFound,
}

impl From<RobotStatus> for WireMessage {
    fn from(s: RobotStatus) -> Self {
        match s {
            RobotStatus::Range(cm) => WireMessage::Range(cm),
            RobotStatus::LaneLost => WireMessage::LaneLost,
            RobotStatus::TargetFound => WireMessage::TargetFound,
        }
    }
}

/// Drives the robot once the turn toward the target is known. A hardware
/// adapter would implement this; [`SimExecutor`] runs the simulator.
pub trait RobotExecutor {
    /// Returns `Ok(true)` on arrival, `Ok(false)` when the robot stopped
    /// elsewhere, and `Err` with a reason on failure.
    fn execute(&mut self, theta: ThetaDeg, status: &mut dyn FnMut(RobotStatus)) -> Result<bool, String>;
}

/// Runs the mission in the simulator and keeps its report.
pub struct SimExecutor {
    pub scenario: Scenario,
    pub report: Option<MissionReport>,
}

impl SimExecutor {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, report: None }
    }
}

impl RobotExecutor for SimExecutor {
    fn execute(&mut self, theta: ThetaDeg, status: &mut dyn FnMut(RobotStatus)) -> Result<bool, String> {
        let report = run_from_theta(&self.scenario, theta, &mut |event| match *event {
            MissionEvent::ObstacleDetected { distance_cm, .. } => status(RobotStatus::Range(distance_cm)),
            MissionEvent::TargetFound { .. } => status(RobotStatus::TargetFound),
        })
        .map_err(|e| e.to_string())?;
        let outcome = report.outcome;
        self.report = Some(report);
        match outcome {
            Outcome::Done => Ok(true),
            other => Err(format!("mission ended {other}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub connect_timeout: Duration,
    /// Longest wait for the server's THETA.
    pub read_timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self {
            connect_timeout: Duration::from_secs(5),
            read_timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClientOutcome {
    /// Reached the target and sent TARGET_FOUND and DONE.
    Completed,
    /// The executor stopped short; the reason went to the server as ERROR.
    MissionFailed(String),
    /// The server's first line was not a valid THETA.
    ProtocolFailure(String),
}

#[derive(Debug, Clone)]
pub struct ClientReport {
    pub outcome: ClientOutcome,
    pub theta: Option<ThetaDeg>,
    pub sent: Vec<WireMessage>,
    pub log: SessionLog,
}

struct Link {
    stream: TcpStream,
    log: SessionLog,
    sent: Vec<WireMessage>,
    ordering: OrderingCheck,
    failure: Option<NetError>,
}

impl Link {
    /// Sends one line; after the first write failure later sends are skipped
    /// and the error is kept for the caller.
    fn send(&mut self, msg: WireMessage) {
        if self.failure.is_some() {
            return;
        }
        if let Err(e) = self.ordering.accept(&msg) {
            self.failure = Some(NetError::Protocol(e));
            return;
        }
        let result = encode(&msg).and_then(|line| {
            self.stream.write_all(line.as_bytes()).map_err(NetError::transport)?;
            self.log.record(Direction::Sent, &line);
            Ok(())
        });
        match result {
            Ok(()) => self.sent.push(msg),
            Err(e) => self.failure = Some(e),
        }
    }

    fn finish(mut self, outcome: ClientOutcome, theta: Option<ThetaDeg>) -> Result<ClientReport, NetError> {
        let flushed = self.stream.flush().map_err(NetError::transport);
        if let Some(e) = self.failure {
            return Err(e);
        }
        flushed?;
        Ok(ClientReport {
            outcome,
            theta,
            sent: self.sent,
            log: self.log,
        })
    }
}

fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> Result<TcpStream, NetError> {
    let mut last = None;
    for a in addr.to_socket_addrs().map_err(NetError::transport)? {
        match TcpStream::connect_timeout(&a, timeout) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.map_or_else(
        || NetError::Transport("address resolved to nothing".into()),
        NetError::transport,
    ))
}

/// Connects, waits for the one THETA, hands it to `executor` while streaming
/// its status lines, and closes with TARGET_FOUND and DONE on arrival.
pub fn run_robot_client(
    addr: impl ToSocketAddrs,
    executor: &mut dyn RobotExecutor,
    config: &ClientConfig,
) -> Result<ClientReport, NetError> {
    let stream = connect(addr, config.connect_timeout)?;
    let mut state = SessionState::new(Role::Client);
    state.connected()?;
    stream
        .set_read_timeout(Some(config.read_timeout))
        .map_err(NetError::transport)?;
    let mut reader = BufReader::new(stream.try_clone().map_err(NetError::transport)?);
    let mut link = Link {
        stream,
        log: SessionLog::new(),
        sent: Vec::new(),
        ordering: OrderingCheck::new(),
        failure: None,
    };

    let mut line = String::new();
    match reader.read_line(&mut line) {
        Ok(_) => {}
        Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
            return Err(NetError::Transport("timed out waiting for THETA".into()));
        }
        Err(e) => return Err(NetError::transport(e)),
    }
    if line.is_empty() {
        return Err(NetError::Transport("server closed before sending THETA".into()));
    }
    link.log.record(Direction::Received, &line);
    let theta = match decode(&line) {
        Ok(WireMessage::Theta(deg)) => ThetaDeg::new(deg).map_err(|e| e.to_string()),
        Ok(other) => Err(format!("expected THETA first, got {}", other.tag())),
        Err(e) => Err(e.to_string()),
    };
    let theta = match theta {
        Ok(theta) => theta,
        Err(reason) => {
            // the session never started streaming; say why and hang up
            let _ = link
                .stream
                .write_all(encode(&WireMessage::Error(reason.clone()))?.as_bytes());
            return link.finish(ClientOutcome::ProtocolFailure(reason), None);
        }
    };
    link.ordering
        .accept(&WireMessage::Theta(theta.value()))
        .expect("first message");
    state.start_streaming()?;

    let mut target_reported = false;
    let result = executor.execute(theta, &mut |status| {
        if status == RobotStatus::TargetFound {
            if target_reported {
                return;
            }
            target_reported = true;
        }
        link.send(status.into());
    });
    let outcome = match result {
        Ok(true) => {
            if !target_reported {
                link.send(WireMessage::TargetFound);
            }
            link.send(WireMessage::Done);
            ClientOutcome::Completed
        }
        Ok(false) => {
            let reason = "robot stopped away from the target".to_string();
            link.send(WireMessage::Error(reason.clone()));
            ClientOutcome::MissionFailed(reason)
        }
        Err(reason) => {
            let text = reason.replace(['\n', '\r'], " ");
            link.send(WireMessage::Error(text.clone()));
            ClientOutcome::MissionFailed(text)
        }
    };
    state.close();
    link.finish(outcome, Some(theta))
}
