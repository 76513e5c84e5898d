use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::session::{Direction, OrderingCheck, Role, SessionLog, SessionState};
use super::{decode, encode, NetError, WireMessage};
use crate::geometry::ThetaDeg;

const ACCEPT_POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Stop after this many sessions; `None` serves forever.
    pub max_sessions: Option<usize>,
    /// Longest silence tolerated from a connected client.
    pub read_timeout: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            max_sessions: None,
            read_timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionOutcome {
    /// Client sent DONE.
    Completed,
    /// Connection closed or failed before DONE.
    Disconnected(String),
    /// Client sent something unparseable or out of order.
    ProtocolError(String),
    /// Client reported a failure with an ERROR line.
    ClientError(String),
    /// The planner could not produce a theta; the client got an ERROR line.
    PlannerError(String),
}

#[derive(Debug, Clone)]
pub struct SessionReport {
    pub peer: Option<SocketAddr>,
    pub outcome: SessionOutcome,
    pub theta: Option<ThetaDeg>,
    /// Client messages in arrival order.
    pub received: Vec<WireMessage>,
    pub log: SessionLog,
}

impl SessionReport {
    pub fn completed(&self) -> bool {
        self.outcome == SessionOutcome::Completed
    }
}

fn send(stream: &mut TcpStream, log: &mut SessionLog, msg: &WireMessage) -> Result<(), String> {
    let line = encode(msg).map_err(|e| e.to_string())?;
    stream
        .write_all(line.as_bytes())
        .and_then(|_| stream.flush())
        .map_err(|e| e.to_string())?;
    log.record(Direction::Sent, &line);
    Ok(())
}

/// Sends the single THETA and then consumes client status lines until DONE
/// or the connection ends.
fn handle_session(mut stream: TcpStream, planned: Result<ThetaDeg, String>, config: &ServerConfig) -> SessionReport {
    let peer = stream.peer_addr().ok();
    let mut log = SessionLog::new();
    let mut state = SessionState::new(Role::Server);
    let report = |outcome, theta, received, log| SessionReport {
        peer,
        outcome,
        theta,
        received,
        log,
    };
    if let Err(e) = stream
        .set_nonblocking(false)
        .and_then(|_| stream.set_read_timeout(Some(config.read_timeout)))
    {
        return report(SessionOutcome::Disconnected(e.to_string()), None, Vec::new(), log);
    }
    state.connected().expect("fresh session");

    let theta = match planned {
        Ok(theta) => theta,
        Err(e) => {
            let _ = send(&mut stream, &mut log, &WireMessage::Error(format!("planner: {e}")));
            return report(SessionOutcome::PlannerError(e), None, Vec::new(), log);
        }
    };
    if let Err(e) = send(&mut stream, &mut log, &WireMessage::Theta(theta.value())) {
        return report(SessionOutcome::Disconnected(e), Some(theta), Vec::new(), log);
    }
    state.start_streaming().expect("ready session");

    let mut ordering = OrderingCheck::new();
    ordering
        .accept(&WireMessage::Theta(theta.value()))
        .expect("first message");
    let mut received = Vec::new();
    let reader_stream = match stream.try_clone() {
        Ok(s) => s,
        Err(e) => return report(SessionOutcome::Disconnected(e.to_string()), Some(theta), received, log),
    };
    let mut reader = BufReader::new(reader_stream);
    let mut line = String::new();
    let outcome = loop {
        line.clear();
        match reader.read_line(&mut line) {
            Ok(0) => break SessionOutcome::Disconnected("client closed the connection before DONE".into()),
            Ok(_) if !line.ends_with('\n') => {
                break SessionOutcome::Disconnected("connection closed mid-line".into());
            }
            Ok(_) => {}
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                break SessionOutcome::Disconnected("read timed out".into());
            }
            Err(e) => break SessionOutcome::Disconnected(e.to_string()),
        }
        log.record(Direction::Received, &line);
        let msg = match decode(&line) {
            Ok(msg) => msg,
            Err(e) => {
                let _ = send(&mut stream, &mut log, &WireMessage::Error(e.to_string()));
                break SessionOutcome::ProtocolError(e.to_string());
            }
        };
        if let Err(e) = ordering.accept(&msg) {
            let _ = send(&mut stream, &mut log, &WireMessage::Error(e.clone()));
            break SessionOutcome::ProtocolError(e);
        }
        received.push(msg.clone());
        match msg {
            WireMessage::Done => break SessionOutcome::Completed,
            WireMessage::Error(text) => break SessionOutcome::ClientError(text),
            _ => {}
        }
    };
    state.close();
    report(outcome, Some(theta), received, log)
}

fn reject_busy(mut stream: TcpStream) {
    let _ = stream.set_nonblocking(false);
    let line = encode(&WireMessage::Error("busy".into())).expect("static message");
    let _ = stream.write_all(line.as_bytes());
}

/// Accepts robot clients one at a time. On each connection `planner` is
/// asked for the turn toward the target, which is sent as the session's only
/// THETA. Connections arriving while a session is active get `ERROR busy`.
/// A failed session never stops the server.
pub fn serve_planner(
    listener: TcpListener,
    mut planner: impl FnMut() -> Result<ThetaDeg, String>,
    config: &ServerConfig,
) -> Result<Vec<SessionReport>, NetError> {
    listener.set_nonblocking(true).map_err(NetError::transport)?;
    let mut reports = Vec::new();
    let mut active: Option<JoinHandle<SessionReport>> = None;
    let done = |n: usize| config.max_sessions.is_some_and(|max| n >= max);
    while !done(reports.len()) {
        if active.as_ref().is_some_and(|h| h.is_finished()) {
            let handle = active.take().expect("checked above");
            reports.push(
                handle
                    .join()
                    .map_err(|_| NetError::Transport("session handler panicked".into()))?,
            );
            continue;
        }
        match listener.accept() {
            Ok((stream, _)) if active.is_some() => reject_busy(stream),
            Ok((stream, _)) => {
                let planned = planner();
                let config = config.clone();
                active = Some(thread::spawn(move || handle_session(stream, planned, &config)));
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => thread::sleep(ACCEPT_POLL),
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(NetError::transport(e)),
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Read;
    use std::net::Shutdown;

    fn start(sessions: usize, theta: f64) -> (SocketAddr, JoinHandle<Result<Vec<SessionReport>, NetError>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let config = ServerConfig {
            max_sessions: Some(sessions),
            read_timeout: Duration::from_secs(5),
        };
        let handle =
            thread::spawn(move || serve_planner(listener, || ThetaDeg::new(theta).map_err(|e| e.to_string()), &config));
        (addr, handle)
    }

    fn first_line(stream: &TcpStream) -> String {
        let mut line = String::new();
        BufReader::new(stream.try_clone().unwrap())
            .read_line(&mut line)
            .unwrap();
        line
    }

    #[test]
    fn sends_theta_first_then_completes_on_done() {
        let (addr, server) = start(1, 30.0);
        let mut client = TcpStream::connect(addr).unwrap();
        assert_eq!(first_line(&client), "THETA 30.000000\n");
        client.write_all(b"RANGE 12.500000\nTARGET_FOUND\nDONE\n").unwrap();
        let reports = server.join().unwrap().unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].completed());
        assert_eq!(
            reports[0].received,
            [WireMessage::Range(12.5), WireMessage::TargetFound, WireMessage::Done]
        );
        assert_eq!(reports[0].log.len(), 4);
    }

    #[test]
    fn vanished_client_does_not_stop_server() {
        let (addr, server) = start(2, -12.25);
        let first = TcpStream::connect(addr).unwrap();
        assert_eq!(first_line(&first), "THETA -12.250000\n");
        first.shutdown(Shutdown::Both).unwrap();
        drop(first);
        // the second connect may race the first session's teardown
        let second = loop {
            let s = TcpStream::connect(addr).unwrap();
            let line = first_line(&s);
            if line.starts_with("THETA") {
                break s;
            }
            assert_eq!(line, "ERROR busy\n");
        };
        (&second).write_all(b"DONE\n").unwrap();
        let reports = server.join().unwrap().unwrap();
        assert!(matches!(reports[0].outcome, SessionOutcome::Disconnected(_)));
        assert!(reports[1].completed());
    }

    #[test]
    fn concurrent_client_rejected() {
        let (addr, server) = start(1, 5.0);
        let first = TcpStream::connect(addr).unwrap();
        assert_eq!(first_line(&first), "THETA 5.000000\n");
        let mut second = TcpStream::connect(addr).unwrap();
        let mut text = String::new();
        second.read_to_string(&mut text).unwrap();
        assert_eq!(text, "ERROR busy\n");
        (&first).write_all(b"DONE\n").unwrap();
        assert!(server.join().unwrap().unwrap()[0].completed());
    }

    #[test]
    fn garbage_is_a_protocol_error() {
        let (addr, server) = start(1, 0.0);
        let client = TcpStream::connect(addr).unwrap();
        assert_eq!(first_line(&client), "THETA 0.000000\n");
        (&client).write_all(b"BOGUS 1\n").unwrap();
        let reports = server.join().unwrap().unwrap();
        assert!(matches!(reports[0].outcome, SessionOutcome::ProtocolError(_)));
        assert!(reports[0]
            .log
            .lines(Direction::Sent)
            .nth(1)
            .unwrap()
            .starts_with("ERROR"));
    }

    #[test]
    fn second_theta_from_client_rejected() {
        let (addr, server) = start(1, 0.0);
        let client = TcpStream::connect(addr).unwrap();
        first_line(&client);
        (&client).write_all(b"THETA 1.000000\n").unwrap();
        let reports = server.join().unwrap().unwrap();
        assert!(matches!(reports[0].outcome, SessionOutcome::ProtocolError(_)));
    }

    #[test]
    fn planner_failure_sent_as_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let config = ServerConfig {
            max_sessions: Some(1),
            ..Default::default()
        };
        let server = thread::spawn(move || serve_planner(listener, || Err("no markers".to_string()), &config));
        let client = TcpStream::connect(addr).unwrap();
        assert_eq!(first_line(&client), "ERROR planner: no markers\n");
        let reports = server.join().unwrap().unwrap();
        assert_eq!(reports[0].outcome, SessionOutcome::PlannerError("no markers".into()));
    }
}
