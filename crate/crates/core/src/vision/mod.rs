//! Lane-keeping image pipeline (Canny, region of interest, Hough, lane
//! pairing) and overhead marker localization.

mod blobs;
mod canny;
mod hough;
mod image;
mod lanes;
mod roi;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blobs::{
    detect_blobs, BlobDetection, DetectionRecord, MarkerLabel, DEFAULT_MIN_BLOB_PIXELS, OBSTACLE_INTENSITY,
    ROBOT_INTENSITY, TARGET_INTENSITY,
};
pub use canny::{canny, gradient_magnitude};
pub use hough::{hough_lines, HoughLine, HoughParams};
pub use image::GrayImage;
pub use lanes::{extract_lanes, LaneObservation, LaneTracker};
pub use roi::{apply_roi, RoiPolygon};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisionError {
    #[error("image {width}x{height} is smaller than the {min}x{min} kernel")]
    ImageTooSmall { width: usize, height: usize, min: usize },
    #[error("invalid thresholds: need 0 <= low ({low}) < high ({high}) <= 255")]
    InvalidThresholds { low: f64, high: f64 },
    #[error("pixel buffer has {actual} values, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("region of interest needs at least 3 vertices, got {0}")]
    DegeneratePolygon(usize),
    #[error("invalid region of interest: {0}")]
    InvalidRoi(String),
    #[error("lane lost (left found: {left}, right found: {right})")]
    LaneLost { left: bool, right: bool },
    #[error("expected exactly one {label} marker, found {count}")]
    DetectionAmbiguity { label: MarkerLabel, count: usize },
    #[error("malformed PGM: {0}")]
    Pgm(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Tunables for the full lane pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanePipeline {
    pub canny_low: f64,
    pub canny_high: f64,
    /// `None` selects the default lower-60% trapezoid for the frame size.
    pub roi: Option<Vec<crate::geometry::ImagePoint>>,
    /// `None` selects defaults derived from the frame height.
    pub hough: Option<HoughParams>,
}

impl Default for LanePipeline {
    fn default() -> Self {
        Self {
            canny_low: 20.0,
            canny_high: 50.0,
            roi: None,
            hough: None,
        }
    }
}

/// Intermediate products of one pipeline run, kept for overlays.
#[derive(Debug, Clone)]
pub struct LaneFrame {
    pub edges: GrayImage,
    pub masked: GrayImage,
    pub lines: Vec<HoughLine>,
}

impl LanePipeline {
    pub fn roi_for(&self, width: usize, height: usize) -> Result<RoiPolygon, VisionError> {
        match &self.roi {
            Some(v) => RoiPolygon::new(v.clone()),
            None => Ok(RoiPolygon::default_lane(width, height)),
        }
    }

    /// Edges, ROI mask and Hough lines for one frame.
    pub fn detect(&self, img: &GrayImage) -> Result<LaneFrame, VisionError> {
        let edges = canny(img, self.canny_low, self.canny_high)?;
        let roi = self.roi_for(img.width(), img.height())?;
        let masked = apply_roi(&edges, &roi)?;
        let params = self.hough.unwrap_or_else(|| HoughParams::for_height(img.height()));
        let lines = hough_lines(&masked, &params);
        Ok(LaneFrame { edges, masked, lines })
    }

    /// Single-frame lane observation, no history.
    pub fn observe(&self, img: &GrayImage) -> Result<LaneObservation, VisionError> {
        let frame = self.detect(img)?;
        extract_lanes(&frame.lines, img.width(), img.height(), None)
    }
}

/// Edge map with the lane segments and midline drawn over it.
pub fn overlay(edges: &GrayImage, obs: &LaneObservation) -> GrayImage {
    let mut out = GrayImage::from_fn(
        edges.width(),
        edges.height(),
        |h, v| {
            if edges.get(h, v) != 0 {
                90
            } else {
                0
            }
        },
    );
    out.draw_segment(obs.left.top, obs.left.bottom, 255);
    out.draw_segment(obs.right.top, obs.right.bottom, 255);
    out.draw_segment(obs.midline.top, obs.midline.bottom, 170);
    out
}
