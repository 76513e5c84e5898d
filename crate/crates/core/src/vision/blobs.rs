use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GrayImage, VisionError};
use crate::geometry::ImagePoint;

/// Overhead-render intensity reserved for the robot marker.
pub const ROBOT_INTENSITY: u8 = 200;
/// Overhead-render intensity reserved for the target marker.
pub const TARGET_INTENSITY: u8 = 100;
/// Overhead-render intensity for obstacles.
pub const OBSTACLE_INTENSITY: u8 = 255;

pub const DEFAULT_MIN_BLOB_PIXELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerLabel {
    Robot,
    Target,
}

impl MarkerLabel {
    pub fn intensity(self) -> u8 {
        match self {
            MarkerLabel::Robot => ROBOT_INTENSITY,
            MarkerLabel::Target => TARGET_INTENSITY,
        }
    }
}

impl fmt::Display for MarkerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarkerLabel::Robot => "robot",
            MarkerLabel::Target => "target",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobDetection {
    pub label: MarkerLabel,
    pub centroid: ImagePoint,
    pub pixel_count: usize,
}

/// JSON record form `{label, h, v, pixel_count}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub label: MarkerLabel,
    pub h: f64,
    pub v: f64,
    pub pixel_count: usize,
}

impl From<&BlobDetection> for DetectionRecord {
    fn from(b: &BlobDetection) -> Self {
        Self {
            label: b.label,
            h: b.centroid.h,
            v: b.centroid.v,
            pixel_count: b.pixel_count,
        }
    }
}

/// 8-connected components of pixels equal to `value`; returns
/// `(pixel_count, centroid)` per component in scan order.
fn components(img: &GrayImage, value: u8) -> Vec<(usize, ImagePoint)> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || img.pixels()[start] != value {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut n, mut sum_h, mut sum_v) = (0usize, 0u64, 0u64);
        while let Some(i) = stack.pop() {
            let (u, v) = (i % w, i / w);
            n += 1;
            sum_h += u as u64;
            sum_v += v as u64;
            for dv in -1isize..=1 {
                for du in -1isize..=1 {
                    let (nu, nv) = (u as isize + du, v as isize + dv);
                    if nu < 0 || nv < 0 || nu >= w as isize || nv >= h as isize {
                        continue;
                    }
                    let j = nv as usize * w + nu as usize;
                    if !seen[j] && img.pixels()[j] == value {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        out.push((n, ImagePoint::new(sum_h as f64 / n as f64, sum_v as f64 / n as f64)));
    }
    out
}

/// Locates exactly one robot and one target marker. Components smaller than
/// `min_pixels` are treated as noise.
pub fn detect_blobs(img: &GrayImage, min_pixels: usize) -> Result<Vec<BlobDetection>, VisionError> {
    let mut found = Vec::with_capacity(2);
    for label in [MarkerLabel::Robot, MarkerLabel::Target] {
        let blobs: Vec<_> = components(img, label.intensity())
            .into_iter()
            .filter(|(n, _)| *n >= min_pixels)
            .collect();
        if blobs.len() != 1 {
            return Err(VisionError::DetectionAmbiguity {
                label,
                count: blobs.len(),
            });
        }
        let (pixel_count, centroid) = blobs[0];
        found.push(BlobDetection {
            label,
            centroid,
            pixel_count,
        });
    }
    Ok(found)
}
