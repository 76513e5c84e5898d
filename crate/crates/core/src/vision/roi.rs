use serde::{Deserialize, Serialize};

use super::{GrayImage, VisionError};
use crate::geometry::ImagePoint;

/// Simple polygon restricting where lane lines are searched for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiPolygon {
    vertices: Vec<ImagePoint>,
}

fn cross(o: ImagePoint, a: ImagePoint, b: ImagePoint) -> f64 {
    (a.h - o.h) * (b.v - o.v) - (a.v - o.v) * (b.h - o.h)
}

fn on_segment(p: ImagePoint, a: ImagePoint, b: ImagePoint) -> bool {
    cross(a, b, p) == 0.0 && p.h >= a.h.min(b.h) && p.h <= a.h.max(b.h) && p.v >= a.v.min(b.v) && p.v <= a.v.max(b.v)
}

fn segments_intersect(a: ImagePoint, b: ImagePoint, c: ImagePoint, d: ImagePoint) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

impl RoiPolygon {
    pub fn new(vertices: Vec<ImagePoint>) -> Result<Self, VisionError> {
        if vertices.len() < 3 {
            return Err(VisionError::DegeneratePolygon(vertices.len()));
        }
        if vertices.iter().any(|p| !p.h.is_finite() || !p.v.is_finite()) {
            return Err(VisionError::InvalidRoi("non-finite vertex".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share a vertex and are allowed to touch there
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(VisionError::InvalidRoi(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(Self { vertices })
    }

    /// Whole-frame rectangle.
    pub fn full(width: usize, height: usize) -> Self {
        let (w, h) = ((width - 1) as f64, (height - 1) as f64);
        Self {
            vertices: vec![
                ImagePoint::new(0.0, 0.0),
                ImagePoint::new(w, 0.0),
                ImagePoint::new(w, h),
                ImagePoint::new(0.0, h),
            ],
        }
    }

    /// Trapezoid over the lower 60% of the frame, its top edge inset by 10%
    /// of the width on each side.
    pub fn default_lane(width: usize, height: usize) -> Self {
        let (w, h) = ((width - 1) as f64, (height - 1) as f64);
        let top = (0.4 * h).round();
        let inset = (0.1 * w).round();
        Self {
            vertices: vec![
                ImagePoint::new(0.0, h),
                ImagePoint::new(inset, top),
                ImagePoint::new(w - inset, top),
                ImagePoint::new(w, h),
            ],
        }
    }

    pub fn vertices(&self) -> &[ImagePoint] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.h * b.v - b.h * a.v
            })
            .sum();
        twice.abs() / 2.0
    }

    /// Boundary points count as inside. A zero-area polygon contains nothing.
    pub fn contains(&self, p: ImagePoint) -> bool {
        if self.area() == 0.0 {
            return false;
        }
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if on_segment(p, a, b) {
                return true;
            }
            if (a.v > p.v) != (b.v > p.v) {
                let h_cross = a.h + (p.v - a.v) * (b.h - a.h) / (b.v - a.v);
                if p.h < h_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn check_bounds(&self, width: usize, height: usize) -> Result<(), VisionError> {
        let (w, h) = ((width - 1) as f64, (height - 1) as f64);
        if self
            .vertices
            .iter()
            .any(|p| p.h < 0.0 || p.v < 0.0 || p.h > w || p.v > h)
        {
            return Err(VisionError::InvalidRoi(format!(
                "vertex outside {width}x{height} image"
            )));
        }
        Ok(())
    }
}

/// Zeroes every pixel whose center lies outside `roi`.
pub fn apply_roi(img: &GrayImage, roi: &RoiPolygon) -> Result<GrayImage, VisionError> {
    roi.check_bounds(img.width(), img.height())?;
    Ok(GrayImage::from_fn(img.width(), img.height(), |h, v| {
        if roi.contains(ImagePoint::new(h as f64, v as f64)) {
            img.get(h, v)
        } else {
            0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(h: f64, v: f64) -> ImagePoint {
        ImagePoint::new(h, v)
    }

    fn checkerboard(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| if (x / 4 + y / 4) % 2 == 0 { 255 } else { 60 })
    }

    #[test]
    fn full_rectangle_is_identity() {
        let img = checkerboard(40, 30);
        assert_eq!(apply_roi(&img, &RoiPolygon::full(40, 30)).unwrap(), img);
    }

    #[test]
    fn zero_area_sliver_masks_everything() {
        let img = checkerboard(40, 30);
        let roi = RoiPolygon::new(vec![p(0.0, 0.0), p(20.0, 0.0), p(39.0, 0.0)]).unwrap();
        assert_eq!(apply_roi(&img, &roi).unwrap().count_nonzero(), 0);
    }

    #[test]
    fn triangle_matches_barycentric_oracle() {
        let img = checkerboard(40, 30);
        let (a, b, c) = (p(2.0, 28.0), p(20.0, 1.0), p(37.0, 25.0));
        let roi = RoiPolygon::new(vec![a, b, c]).unwrap();
        let masked = apply_roi(&img, &roi).unwrap();
        // oracle: same-sign test of the three edge functions, boundary inclusive
        let edge = |o: ImagePoint, d: ImagePoint, q: ImagePoint| (d.h - o.h) * (q.v - o.v) - (d.v - o.v) * (q.h - o.h);
        for v in 0..30 {
            for h in 0..40 {
                let q = p(h as f64, v as f64);
                let (e0, e1, e2) = (edge(a, b, q), edge(b, c, q), edge(c, a, q));
                let inside = (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) || (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0);
                let expected = if inside { img.get(h, v) } else { 0 };
                assert_eq!(masked.get(h, v), expected, "pixel ({h}, {v})");
            }
        }
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(matches!(
            RoiPolygon::new(vec![p(0.0, 0.0), p(1.0, 1.0)]),
            Err(VisionError::DegeneratePolygon(2))
        ));
        // bow-tie
        assert!(RoiPolygon::new(vec![p(0.0, 0.0), p(10.0, 10.0), p(10.0, 0.0), p(0.0, 10.0)]).is_err());
        let roi = RoiPolygon::new(vec![p(0.0, 0.0), p(50.0, 0.0), p(0.0, 50.0)]).unwrap();
        assert!(apply_roi(&GrayImage::new(10, 10), &roi).is_err());
    }

    #[test]
    fn default_lane_roi_is_valid() {
        let roi = RoiPolygon::default_lane(320, 240);
        let again = RoiPolygon::new(roi.vertices().to_vec()).unwrap();
        assert!(again.contains(p(160.0, 200.0)));
        assert!(!again.contains(p(160.0, 10.0)));
    }
}
