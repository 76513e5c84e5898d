//! Standard (rho, theta) Hough line transform.
//!
//! Votes are accumulated with the image center as origin so that a
//! horizontally mirrored edge map votes into exactly mirrored bins. Reported
//! `rho` values are converted back to the top-left image origin.

use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::geometry::{ImagePoint, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoughParams {
    pub rho_res: f64,
    pub theta_res_deg: f64,
    pub min_votes: usize,
}

impl HoughParams {
    /// 1 px, 1 degree, and a vote floor of 30% of the image height.
    pub fn for_height(height: usize) -> Self {
        Self {
            rho_res: 1.0,
            theta_res_deg: 1.0,
            min_votes: (0.3 * height as f64).round() as usize,
        }
    }
}

/// A detected line `rho = h cos(theta) + v sin(theta)` in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoughLine {
    pub rho: f64,
    /// Normal angle in degrees, `[0, 180)`.
    pub theta_deg: f64,
    pub votes: usize,
    /// Line clipped to the extent of the edge pixels that voted for it.
    pub segment: Segment,
}

impl HoughLine {
    /// Horizontal coordinate where the line crosses row `v`, if it is not
    /// horizontal.
    pub fn h_at(&self, v: f64) -> Option<f64> {
        let (s, c) = self.theta_deg.to_radians().sin_cos();
        if c.abs() < 1e-12 {
            return None;
        }
        Some((self.rho - v * s) / c)
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance_to(&self, p: ImagePoint) -> f64 {
        let (s, c) = self.theta_deg.to_radians().sin_cos();
        (p.h * c + p.v * s - self.rho).abs()
    }
}

struct TrigTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    /// Entries `i` and `n - i` are exact mirrors: cos negated, sin equal.
    fn new(n: usize, res_deg: f64) -> Self {
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for i in 0..=(n / 2).min(n - 1) {
            let (s, c) = (i as f64 * res_deg).to_radians().sin_cos();
            cos[i] = c;
            sin[i] = s;
        }
        for i in (n / 2 + 1)..n {
            cos[i] = -cos[n - i];
            sin[i] = sin[n - i];
        }
        if n.is_multiple_of(2) {
            // 90 degrees exactly
            cos[n / 2] = 0.0;
            sin[n / 2] = 1.0;
        }
        Self { cos, sin }
    }
}

pub fn hough_lines(edges: &GrayImage, params: &HoughParams) -> Vec<HoughLine> {
    let (w, h) = (edges.width(), edges.height());
    let n_theta = (180.0 / params.theta_res_deg).round().max(1.0) as usize;
    let trig = TrigTable::new(n_theta, params.theta_res_deg);
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let max_rho = cx.hypot(cy);
    let half_bins = (max_rho / params.rho_res).ceil() as isize + 1;
    let n_rho = (2 * half_bins + 1) as usize;

    let points: Vec<(f64, f64)> = (0..h)
        .flat_map(|v| (0..w).map(move |u| (u, v)))
        .filter(|&(u, v)| edges.get(u, v) != 0)
        .map(|(u, v)| (u as f64 - cx, v as f64 - cy))
        .collect();
    if points.is_empty() {
        return Vec::new();
    }

    let bin_of =
        |x: f64, y: f64, t: usize| -> isize { ((x * trig.cos[t] + y * trig.sin[t]) / params.rho_res).round() as isize };

    let mut acc = vec![0usize; n_theta * n_rho];
    for &(x, y) in &points {
        for t in 0..n_theta {
            let k = bin_of(x, y, t);
            acc[t * n_rho + (k + half_bins) as usize] += 1;
        }
    }

    let votes_at = |t: isize, k: isize| -> usize {
        // theta wraps to the opposite normal with negated rho
        let (t, k) = if t < 0 {
            (t + n_theta as isize, -k)
        } else if t >= n_theta as isize {
            (t - n_theta as isize, -k)
        } else {
            (t, k)
        };
        if k < -half_bins || k > half_bins {
            0
        } else {
            acc[t as usize * n_rho + (k + half_bins) as usize]
        }
    };

    let mut peaks = Vec::new();
    for t in 0..n_theta as isize {
        for k in -half_bins..=half_bins {
            let votes = votes_at(t, k);
            if votes == 0 || votes < params.min_votes {
                continue;
            }
            let is_max =
                (-1..=1).all(|dt| (-1..=1).all(|dk| (dt == 0 && dk == 0) || votes_at(t + dt, k + dk) <= votes));
            if is_max {
                peaks.push((t as usize, k, votes));
            }
        }
    }
    peaks.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    peaks
        .into_iter()
        .map(|(t, k, votes)| {
            let (c, s) = (trig.cos[t], trig.sin[t]);
            let rho_c = k as f64 * params.rho_res;
            // extent of voters along the line direction (-sin, cos)
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(x, y) in &points {
                if bin_of(x, y, t) == k {
                    let along = -x * s + y * c;
                    lo = lo.min(along);
                    hi = hi.max(along);
                }
            }
            let at = |along: f64| ImagePoint::new(rho_c * c - along * s + cx, rho_c * s + along * c + cy);
            HoughLine {
                rho: rho_c + cx * c + cy * s,
                theta_deg: t as f64 * params.theta_res_deg,
                votes,
                segment: Segment::new(at(lo), at(hi)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_best(edges: &GrayImage) -> (f64, f64, usize) {
        // oracle: integer-rho votes in image-origin coordinates
        let mut best = (0.0, 0.0, 0usize);
        for t in 0..180 {
            let (s, c) = (t as f64).to_radians().sin_cos();
            let mut counts = std::collections::HashMap::new();
            for v in 0..edges.height() {
                for u in 0..edges.width() {
                    if edges.get(u, v) != 0 {
                        let r = (u as f64 * c + v as f64 * s).round() as i64;
                        *counts.entry(r).or_insert(0usize) += 1;
                    }
                }
            }
            for (r, n) in counts {
                if n > best.2 {
                    best = (r as f64, t as f64, n);
                }
            }
        }
        best
    }

    #[test]
    fn vertical_column_is_found() {
        let edges = GrayImage::from_fn(200, 200, |h, _| if h == 50 { 255 } else { 0 });
        let lines = hough_lines(&edges, &HoughParams::for_height(200));
        let top = lines[0];
        let oracle = brute_force_best(&edges);
        assert!((top.rho - 50.0).abs() <= 2.0 && top.theta_deg.min(180.0 - top.theta_deg) <= 2.0);
        assert!((top.rho - oracle.0).abs() <= 2.0 && (top.theta_deg - oracle.1).abs() <= 2.0);
        assert_eq!(top.votes, 200);
        assert!((top.segment.top.v - 0.0).abs() < 1e-9 && (top.segment.bottom.v - 199.0).abs() < 1e-9);
    }

    #[test]
    fn horizontal_row_is_found() {
        let edges = GrayImage::from_fn(200, 200, |_, v| if v == 80 { 255 } else { 0 });
        let top = hough_lines(&edges, &HoughParams::for_height(200))[0];
        assert!((top.rho - 80.0).abs() <= 2.0);
        assert!((top.theta_deg - 90.0).abs() <= 2.0);
    }

    #[test]
    fn blank_map_has_no_lines() {
        assert!(hough_lines(&GrayImage::new(50, 50), &HoughParams::for_height(50)).is_empty());
    }

    #[test]
    fn voters_lie_near_reported_line() {
        let edges = GrayImage::from_fn(120, 100, |h, v| {
            if (h as f64 - (30.0 + 0.5 * v as f64)).abs() < 0.5 {
                255
            } else {
                0
            }
        });
        let params = HoughParams {
            rho_res: 1.0,
            theta_res_deg: 1.0,
            min_votes: 40,
        };
        let lines = hough_lines(&edges, &params);
        assert!(!lines.is_empty());
        for line in &lines {
            let near = (0..100)
                .flat_map(|v| (0..120).map(move |h| (h, v)))
                .filter(|&(h, v)| edges.get(h, v) != 0)
                .filter(|&(h, v)| line.distance_to(ImagePoint::new(h as f64, v as f64)) <= params.rho_res)
                .count();
            assert!(near >= params.min_votes, "line {line:?} has {near} supporting pixels");
        }
    }

    #[test]
    fn mirrored_map_gives_mirrored_lines() {
        let edges = GrayImage::from_fn(90, 70, |h, v| {
            if (h as f64 - (10.0 + 0.7 * v as f64)).abs() < 0.5 {
                255
            } else {
                0
            }
        });
        let params = HoughParams::for_height(70);
        let a = hough_lines(&edges, &params)[0];
        let b = hough_lines(&edges.flip_horizontal(), &params)[0];
        assert_eq!(a.votes, b.votes);
        assert!((a.theta_deg - (180.0 - b.theta_deg)).abs() < 1e-9);
        assert!((a.segment.top.h - (89.0 - b.segment.top.h)).abs() < 1e-9);
        assert!((a.segment.bottom.h - (89.0 - b.segment.bottom.h)).abs() < 1e-9);
    }
}
