//! Angle computations for lane-following steering and the timed-turn model.
//!
//! All image-space angles use the same sign convention: a midline whose top
//! end leans to the right of its reference produces a positive theta, which
//! the robot executes as a right turn.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Calibrated in-place rotation rate of the robot, degrees per second.
pub const TURN_RATE_DEG_PER_S: f64 = 23.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate triangle: side lengths a={a}, b={b} must be positive")]
    DegenerateTriangle { a: f64, b: f64 },
    #[error("degenerate midline: top and bottom endpoints coincide")]
    DegenerateMidline,
    #[error("undefined heading: top and bottom endpoints share row {v}")]
    UndefinedHeading { v: f64 },
    #[error("non-finite angle {0}")]
    NonFinite(f64),
}

/// Pixel coordinate: `h` grows rightward, `v` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagePoint {
    pub h: f64,
    pub v: f64,
}

impl ImagePoint {
    pub const fn new(h: f64, v: f64) -> Self {
        Self { h, v }
    }

    pub fn distance(&self, other: &ImagePoint) -> f64 {
        (self.h - other.h).hypot(self.v - other.v)
    }
}

/// A line segment in image space, top end first (`top.v <= bottom.v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub top: ImagePoint,
    pub bottom: ImagePoint,
}

impl Segment {
    pub fn new(a: ImagePoint, b: ImagePoint) -> Self {
        if a.v <= b.v {
            Self { top: a, bottom: b }
        } else {
            Self { top: b, bottom: a }
        }
    }
}

/// Signed turn angle in degrees, normalized to `(-180, 180]`.
/// Negative turns left, positive turns right.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct ThetaDeg(f64);

impl ThetaDeg {
    pub const ZERO: ThetaDeg = ThetaDeg(0.0);

    /// Wraps any finite angle into `(-180, 180]`.
    pub fn new(deg: f64) -> Result<Self, GeometryError> {
        if !deg.is_finite() {
            return Err(GeometryError::NonFinite(deg));
        }
        Ok(Self(normalize_deg(deg)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }
}

impl fmt::Display for ThetaDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

/// Wraps degrees into `(-180, 180]`.
pub fn normalize_deg(deg: f64) -> f64 {
    let mut d = deg % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    // collapse -0.0
    if d == 0.0 {
        0.0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
    Straight,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Straight => "straight",
        };
        f.write_str(s)
    }
}

/// Open-loop turn: spin in place toward `direction` for `duration_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteerCommand {
    pub direction: Direction,
    pub duration_s: f64,
    pub theta: ThetaDeg,
}

impl SteerCommand {
    /// Signed rotation this command produces at `turn_rate` deg/s.
    pub fn signed_turn_deg(&self, turn_rate: f64) -> f64 {
        let sign = match self.direction {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
            Direction::Straight => 0.0,
        };
        sign * turn_rate * self.duration_s
    }
}

/// Angle (degrees, unsigned) opposite side `c` in a triangle with sides
/// `a`, `b`, `c`. The cosine is clamped so near-degenerate triangles do not
/// produce NaN.
pub fn law_of_cosines_deg(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(GeometryError::DegenerateTriangle { a, b });
    }
    let cos = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

fn signed(magnitude: f64, lean: f64) -> ThetaDeg {
    if lean > 0.0 {
        ThetaDeg(magnitude)
    } else if lean < 0.0 {
        ThetaDeg(-magnitude)
    } else {
        ThetaDeg::ZERO
    }
}

/// Multi-iteration theta from two consecutive midlines.
///
/// The vertex is the previous bottom endpoint. The current top endpoint is
/// moved onto the previous top's row before measuring, so the opposite side
/// is the horizontal gap between the two tops.
pub fn theta_multi(
    prev_top: ImagePoint,
    prev_bottom: ImagePoint,
    curr_top: ImagePoint,
) -> Result<ThetaDeg, GeometryError> {
    let a = prev_top.distance(&prev_bottom);
    if a == 0.0 {
        return Err(GeometryError::DegenerateMidline);
    }
    let snapped = ImagePoint::new(curr_top.h, prev_top.v);
    let gap = curr_top.h - prev_top.h;
    if gap == 0.0 {
        return Ok(ThetaDeg::ZERO);
    }
    let b = snapped.distance(&prev_bottom);
    let c = gap.abs();
    let magnitude = law_of_cosines_deg(a, b, c)?;
    Ok(signed(magnitude, gap))
}

/// Single-iteration theta: angle between the midline and a vertical ray
/// through its bottom endpoint.
pub fn theta_single(top: ImagePoint, bottom: ImagePoint) -> Result<ThetaDeg, GeometryError> {
    let rise = (top.v - bottom.v).abs();
    if rise == 0.0 {
        return Err(GeometryError::UndefinedHeading { v: top.v });
    }
    let lean = top.h - bottom.h;
    if lean == 0.0 {
        return Ok(ThetaDeg::ZERO);
    }
    let a = top.distance(&bottom);
    let magnitude = law_of_cosines_deg(a, rise, lean.abs())?;
    Ok(signed(magnitude, lean))
}

/// Two-deep FIFO of midline observations used by [`theta_multi`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThetaHistory {
    items: VecDeque<Segment>,
}

impl ThetaHistory {
    pub const DEPTH: usize = 2;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, obs: Segment) {
        if self.items.len() == Self::DEPTH {
            self.items.pop_front();
        }
        self.items.push_back(obs);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn latest(&self) -> Option<&Segment> {
        self.items.back()
    }

    pub fn previous(&self) -> Option<&Segment> {
        if self.items.len() == Self::DEPTH {
            self.items.front()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Segment> {
        self.items.iter()
    }

    /// Theta from the two stored observations, oldest as reference.
    pub fn theta(&self) -> Option<Result<ThetaDeg, GeometryError>> {
        let prev = self.previous()?;
        let curr = self.latest()?;
        Some(theta_multi(prev.top, prev.bottom, curr.top))
    }
}

/// Functional form of [`ThetaHistory::push`].
pub fn theta_fifo_push(mut queue: ThetaHistory, obs: Segment) -> ThetaHistory {
    queue.push(obs);
    queue
}

/// Turn command at the calibrated 23 deg/s rate.
pub fn steer_from_theta(theta: ThetaDeg) -> SteerCommand {
    steer_with_rate(theta, TURN_RATE_DEG_PER_S)
}

pub fn steer_with_rate(theta: ThetaDeg, turn_rate: f64) -> SteerCommand {
    let direction = if theta.value() < 0.0 {
        Direction::Left
    } else if theta.value() > 0.0 {
        Direction::Right
    } else {
        Direction::Straight
    };
    SteerCommand {
        direction,
        duration_s: theta.abs() / turn_rate,
        theta,
    }
}
