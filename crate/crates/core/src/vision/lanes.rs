use serde::{Deserialize, Serialize};

use super::{HoughLine, VisionError};
use crate::geometry::{theta_single, GeometryError, ImagePoint, Segment, ThetaDeg, ThetaHistory};

/// Lines closer than this to horizontal are never lane boundaries.
const MIN_LANE_TILT_FROM_HORIZONTAL_DEG: f64 = 15.0;

/// Left/right lane boundaries and their midline, all sampled on the same two
/// image rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneObservation {
    pub left: Segment,
    pub right: Segment,
    pub midline: Segment,
    /// One side was missing in this frame and was carried over from the
    /// previous observation.
    pub degraded: bool,
}

impl LaneObservation {
    pub fn theta_single(&self) -> Result<ThetaDeg, GeometryError> {
        theta_single(self.midline.top, self.midline.bottom)
    }
}

/// Horizontal coordinate of the (extended) segment at row `v`.
fn h_at(seg: &Segment, v: f64) -> f64 {
    let dv = seg.bottom.v - seg.top.v;
    let t = (v - seg.top.v) / dv;
    seg.top.h + (seg.bottom.h - seg.top.h) * t
}

struct Candidate {
    segment: Segment,
    votes: usize,
    /// distance of the bottom-row intercept from the image center column
    offset: f64,
    lean: f64,
}

fn pick(mut cands: Vec<Candidate>) -> Option<Segment> {
    // Key is invariant under horizontal mirroring, so mirrored frames select
    // mirrored lines.
    cands.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(a.offset.total_cmp(&b.offset))
            .then(a.lean.abs().total_cmp(&b.lean.abs()))
    });
    cands.first().map(|c| c.segment)
}

/// Pairs the strongest line on each half of the frame into a lane.
///
/// A side is assigned by where the line crosses the bottom row. When one side
/// is missing and `previous` is given, that side is reused from it and the
/// observation is flagged degraded.
pub fn extract_lanes(
    lines: &[HoughLine],
    img_width: usize,
    img_height: usize,
    previous: Option<&LaneObservation>,
) -> Result<LaneObservation, VisionError> {
    let center = (img_width as f64 - 1.0) / 2.0;
    let bottom = img_height as f64 - 1.0;
    let min_tilt = MIN_LANE_TILT_FROM_HORIZONTAL_DEG.to_radians().sin();

    let mut left = Vec::new();
    let mut right = Vec::new();
    for line in lines {
        let seg = line.segment;
        if seg.bottom.v - seg.top.v <= 0.0 {
            continue;
        }
        if line.theta_deg.to_radians().cos().abs() < min_tilt {
            continue;
        }
        let intercept = h_at(&seg, bottom);
        let cand = Candidate {
            segment: seg,
            votes: line.votes,
            offset: (intercept - center).abs(),
            lean: seg.top.h - seg.bottom.h,
        };
        if intercept < center {
            left.push(cand);
        } else if intercept > center {
            right.push(cand);
        }
    }

    let (left, right, degraded) = match (pick(left), pick(right), previous) {
        (Some(l), Some(r), _) => (l, r, false),
        (Some(l), None, Some(prev)) => (l, prev.right, true),
        (None, Some(r), Some(prev)) => (prev.left, r, true),
        (None, None, Some(prev)) => (prev.left, prev.right, true),
        (l, r, None) => {
            return Err(VisionError::LaneLost {
                left: l.is_some(),
                right: r.is_some(),
            })
        }
    };

    // sample both sides on shared rows: the lower of the two tops, and the
    // bottom of the frame
    let mut top_v = left.top.v.max(right.top.v);
    if top_v >= bottom {
        top_v = left.top.v.min(right.top.v);
    }
    if top_v >= bottom {
        return Err(VisionError::LaneLost {
            left: true,
            right: true,
        });
    }
    let sample = |s: &Segment| {
        Segment::new(
            ImagePoint::new(h_at(s, top_v), top_v),
            ImagePoint::new(h_at(s, bottom), bottom),
        )
    };
    let (l, r) = (sample(&left), sample(&right));
    let midline = Segment::new(
        ImagePoint::new((l.top.h + r.top.h) / 2.0, top_v),
        ImagePoint::new((l.bottom.h + r.bottom.h) / 2.0, bottom),
    );
    Ok(LaneObservation {
        left: l,
        right: r,
        midline,
        degraded,
    })
}

/// Frame-to-frame lane state: the last observation for fallback, and the
/// midline FIFO for multi-iteration theta.
#[derive(Debug, Clone, Default)]
pub struct LaneTracker {
    last: Option<LaneObservation>,
    history: ThetaHistory,
}

impl LaneTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(
        &mut self,
        lines: &[HoughLine],
        img_width: usize,
        img_height: usize,
    ) -> Result<LaneObservation, VisionError> {
        let obs = extract_lanes(lines, img_width, img_height, self.last.as_ref())?;
        self.last = Some(obs);
        self.history.push(obs.midline);
        Ok(obs)
    }

    pub fn history(&self) -> &ThetaHistory {
        &self.history
    }

    pub fn theta_multi(&self) -> Option<Result<ThetaDeg, GeometryError>> {
        self.history.theta()
    }
}
