use std::fmt;

use super::NetError;

/// One protocol line. Theta and range payloads travel as decimals with six
/// places, so only values on that grid survive a round trip unchanged.
#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    Theta(f64),
    Range(f64),
    TargetFound,
    LaneLost,
    Done,
    Error(String),
}

impl WireMessage {
    pub fn tag(&self) -> &'static str {
        match self {
            WireMessage::Theta(_) => "THETA",
            WireMessage::Range(_) => "RANGE",
            WireMessage::TargetFound => "TARGET_FOUND",
            WireMessage::LaneLost => "LANE_LOST",
            WireMessage::Done => "DONE",
            WireMessage::Error(_) => "ERROR",
        }
    }
}

impl fmt::Display for WireMessage {
    /// The encoded line without its terminator, or a placeholder for
    /// unencodable payloads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match encode(self) {
            Ok(line) => f.write_str(line.trim_end_matches('\n')),
            Err(_) => write!(f, "{} <invalid>", self.tag()),
        }
    }
}

/// Canonical line for `msg`, including the trailing linefeed.
pub fn encode(msg: &WireMessage) -> Result<String, NetError> {
    let line = match msg {
        WireMessage::Theta(deg) => {
            if !deg.is_finite() {
                return Err(NetError::Encode(format!("theta must be finite, got {deg}")));
            }
            format!("THETA {deg:.6}\n")
        }
        WireMessage::Range(cm) => {
            if !(cm.is_finite() && *cm >= 0.0) {
                return Err(NetError::Encode(format!(
                    "range must be finite and non-negative, got {cm}"
                )));
            }
            format!("RANGE {cm:.6}\n")
        }
        WireMessage::Error(text) => {
            if text.contains(['\n', '\r']) {
                return Err(NetError::Encode("error text may not contain line breaks".into()));
            }
            format!("ERROR {text}\n")
        }
        other => format!("{}\n", other.tag()),
    };
    Ok(line)
}

fn number(tag: &str, payload: Option<&str>) -> Result<f64, NetError> {
    let text = payload.ok_or_else(|| NetError::Protocol(format!("{tag} needs a payload")))?;
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(NetError::Protocol(format!(
            "{tag} payload {text:?} is not a finite number"
        ))),
    }
}

/// Parses one line. A single trailing linefeed and then a single carriage
/// return are stripped.
pub fn decode(line: &str) -> Result<WireMessage, NetError> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.contains(['\n', '\r']) {
        return Err(NetError::Protocol("embedded line break".into()));
    }
    let (tag, payload) = match line.split_once(' ') {
        Some((tag, rest)) => (tag, Some(rest)),
        None => (line, None),
    };
    let bare = |msg: WireMessage| match payload {
        None => Ok(msg),
        Some(_) => Err(NetError::Protocol(format!("{tag} takes no payload"))),
    };
    match tag {
        "THETA" => Ok(WireMessage::Theta(number(tag, payload)?)),
        "RANGE" => {
            let cm = number(tag, payload)?;
            if cm < 0.0 {
                return Err(NetError::Protocol(format!("negative range {cm}")));
            }
            Ok(WireMessage::Range(cm))
        }
        "TARGET_FOUND" => bare(WireMessage::TargetFound),
        "LANE_LOST" => bare(WireMessage::LaneLost),
        "DONE" => bare(WireMessage::Done),
        "ERROR" => Ok(WireMessage::Error(payload.unwrap_or("").to_string())),
        _ => Err(NetError::Protocol(format!("unknown message type {tag:?}"))),
    }
}
