//! Line protocol between the planning workstation and the robot.
//!
//! The server computes one theta and sends it as the session's first and
//! only THETA line; from then on the robot drives on its own and reports
//! range events, arrival and completion back as status lines.

mod client;
mod server;
mod session;
mod wire;

use std::net::TcpListener;
use std::thread;

use thiserror::Error;

pub use client::{
    run_robot_client, ClientConfig, ClientOutcome, ClientReport, RobotExecutor, RobotStatus, SimExecutor,
};
pub use server::{serve_planner, ServerConfig, SessionOutcome, SessionReport};
pub use session::{check_ordering, Direction, OrderingCheck, Role, SessionLog, SessionPhase, SessionState};
pub use wire::{decode, encode, WireMessage};

use crate::sim::{plan_initial_theta, MissionReport, Scenario};

pub const DEFAULT_PORT: u16 = 7878;
pub const PORT_ENV: &str = "WAYPATH_PORT";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("cannot encode message: {0}")]
    Encode(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("session cannot move from {from} to {to}")]
    Session { from: SessionPhase, to: SessionPhase },
}

impl NetError {
    pub(crate) fn transport(e: std::io::Error) -> Self {
        NetError::Transport(e.to_string())
    }
}

/// Everything one in-process planner/robot session produced.
#[derive(Debug)]
pub struct LoopbackRun {
    pub mission: Option<MissionReport>,
    pub client: ClientReport,
    pub server: SessionReport,
}

/// Runs a full mission through the protocol over a loopback socket: the
/// planner side computes theta from the overhead view and serves it, the
/// robot side executes it in the simulator.
pub fn run_loopback_mission(scenario: &Scenario) -> Result<LoopbackRun, NetError> {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(NetError::transport)?;
    let addr = listener.local_addr().map_err(NetError::transport)?;
    let planner_view = scenario.clone();
    let config = ServerConfig {
        max_sessions: Some(1),
        ..ServerConfig::default()
    };
    let server = thread::spawn(move || {
        serve_planner(
            listener,
            || plan_initial_theta(&planner_view).map_err(|e| e.to_string()),
            &config,
        )
    });
    let mut executor = SimExecutor::new(scenario.clone());
    let client = run_robot_client(addr, &mut executor, &ClientConfig::default());
    let reports = server
        .join()
        .map_err(|_| NetError::Transport("planner thread panicked".into()))??;
    let server = reports
        .into_iter()
        .next()
        .ok_or_else(|| NetError::Transport("planner served no session".into()))?;
    Ok(LoopbackRun {
        mission: executor.report,
        client: client?,
        server,
    })
}
