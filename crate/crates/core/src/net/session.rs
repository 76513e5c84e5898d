use std::fmt;
use std::fmt::Write as _;
use std::time::Instant;

use super::{NetError, WireMessage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Server,
    Client,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionPhase {
    Connecting,
    Ready,
    Streaming,
    Closed,
}

impl fmt::Display for SessionPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionState {
    pub role: Role,
    pub phase: SessionPhase,
}

impl SessionState {
    pub fn new(role: Role) -> Self {
        Self {
            role,
            phase: SessionPhase::Connecting,
        }
    }

    fn advance(&mut self, from: SessionPhase, to: SessionPhase) -> Result<(), NetError> {
        if self.phase != from {
            return Err(NetError::Session { from: self.phase, to });
        }
        self.phase = to;
        Ok(())
    }

    pub fn connected(&mut self) -> Result<(), NetError> {
        self.advance(SessionPhase::Connecting, SessionPhase::Ready)
    }

    pub fn start_streaming(&mut self) -> Result<(), NetError> {
        self.advance(SessionPhase::Ready, SessionPhase::Streaming)
    }

    pub fn close(&mut self) {
        self.phase = SessionPhase::Closed;
    }

    /// Messages may only be exchanged while streaming.
    pub fn check_exchange(&self) -> Result<(), NetError> {
        if self.phase == SessionPhase::Streaming {
            Ok(())
        } else {
            Err(NetError::Session {
                from: self.phase,
                to: SessionPhase::Streaming,
            })
        }
    }
}

/// Per-session ordering rules: exactly one THETA, first; every RANGE after
/// it; TARGET_FOUND before DONE; nothing after DONE.
#[derive(Debug, Clone, Default)]
pub struct OrderingCheck {
    theta_seen: bool,
    target_found: bool,
    done: bool,
}

impl OrderingCheck {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accept(&mut self, msg: &WireMessage) -> Result<(), String> {
        if self.done {
            return Err(format!("{} after DONE", msg.tag()));
        }
        match msg {
            WireMessage::Theta(_) if self.theta_seen => return Err("second THETA in session".into()),
            WireMessage::Theta(_) => self.theta_seen = true,
            _ if !self.theta_seen => return Err(format!("{} before THETA", msg.tag())),
            WireMessage::TargetFound => self.target_found = true,
            WireMessage::Done => self.done = true,
            _ => {}
        }
        Ok(())
    }

    pub fn target_found(&self) -> bool {
        self.target_found
    }
}

pub fn check_ordering(messages: &[WireMessage]) -> Result<(), String> {
    let mut check = OrderingCheck::new();
    messages.iter().try_for_each(|m| check.accept(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sent,
    Received,
}

/// Timestamped record of every line a peer sent or received.
#[derive(Debug, Clone)]
pub struct SessionLog {
    start: Instant,
    entries: Vec<(f64, Direction, String)>,
}

impl Default for SessionLog {
    fn default() -> Self {
        Self::new()
    }
}

impl SessionLog {
    pub fn new() -> Self {
        Self {
            start: Instant::now(),
            entries: Vec::new(),
        }
    }

    pub fn record(&mut self, dir: Direction, line: &str) {
        let t = self.start.elapsed().as_secs_f64();
        self.entries
            .push((t, dir, line.trim_end_matches(['\n', '\r']).to_string()));
    }

    /// Lines in order, without timestamps.
    pub fn lines(&self, dir: Direction) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(move |e| e.1 == dir).map(|e| e.2.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (t, dir, line) in &self.entries {
            let arrow = match dir {
                Direction::Sent => '>',
                Direction::Received => '<',
            };
            let _ = writeln!(out, "{t:.6} {arrow} {line}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_in_order() {
        let mut s = SessionState::new(Role::Client);
        assert!(s.check_exchange().is_err());
        assert!(s.start_streaming().is_err());
        s.connected().unwrap();
        assert!(s.connected().is_err());
        s.start_streaming().unwrap();
        s.check_exchange().unwrap();
        s.close();
        assert!(s.check_exchange().is_err());
    }

    #[test]
    fn ordering_rules() {
        use WireMessage::*;
        assert!(check_ordering(&[Theta(1.0), Range(20.0), TargetFound, Done]).is_ok());
        assert!(check_ordering(&[Range(20.0), Theta(1.0)]).is_err());
        assert!(check_ordering(&[Theta(1.0), Theta(2.0)]).is_err());
        assert!(check_ordering(&[Theta(1.0), Done, Range(3.0)]).is_err());
        assert!(check_ordering(&[]).is_ok());
    }

    #[test]
    fn log_renders_directions() {
        let mut log = SessionLog::new();
        log.record(Direction::Sent, "THETA 1.000000\n");
        log.record(Direction::Received, "DONE\r\n");
        let text = log.render();
        assert!(text.lines().next().unwrap().ends_with("> THETA 1.000000"));
        assert!(text.lines().nth(1).unwrap().ends_with("< DONE"));
        assert_eq!(log.lines(Direction::Received).collect::<Vec<_>>(), ["DONE"]);
    }
}
