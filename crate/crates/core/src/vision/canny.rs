//! Canny edge detector.
//!
//! Smoothing uses the integer 5x5 approximation of a Gaussian with
//! sigma = 1.4 (weights sum to 159) and Sobel 3x3 gradients, both in exact
//! integer arithmetic so results are reproducible bit for bit and mirror
//! symmetric. Thresholds are in per-pixel intensity-gradient units: a hard
//! 0 -> 255 step has gradient 127.5 before smoothing.

use std::collections::VecDeque;

use super::{GrayImage, VisionError};

const GAUSS_5X5: [[i64; 5]; 5] = [
    [2, 4, 5, 4, 2],
    [4, 9, 12, 9, 4],
    [5, 12, 15, 12, 5],
    [4, 9, 12, 9, 4],
    [2, 4, 5, 4, 2],
];
const GAUSS_SUM: i64 = 159;
/// Sobel gain (8) times the blur normalization.
const GRADIENT_SCALE: f64 = 8.0 * GAUSS_SUM as f64;
// tan(22.5 deg) as a rational bound for direction quantization: 0.41421356
const TAN_22_5_NUM: i64 = 41_421_356;
const TAN_22_5_DEN: i64 = 100_000_000;

pub const KERNEL_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

/// Unnormalized blur, values scaled by 159.
fn blur(img: &GrayImage) -> Vec<i64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let clamp = |x: isize, max: isize| x.clamp(0, max - 1) as usize;
    let mut out = vec![0i64; img.pixels().len()];
    for v in 0..h {
        for u in 0..w {
            let mut acc = 0i64;
            for (kv, row) in GAUSS_5X5.iter().enumerate() {
                for (ku, &k) in row.iter().enumerate() {
                    let su = clamp(u + ku as isize - 2, w);
                    let sv = clamp(v + kv as isize - 2, h);
                    acc += k * img.get(su, sv) as i64;
                }
            }
            out[(v * w + u) as usize] = acc;
        }
    }
    out
}

fn sobel(field: &[i64], w: usize, h: usize) -> (Vec<i64>, Vec<i64>) {
    let at = |u: isize, v: isize| {
        let u = u.clamp(0, w as isize - 1) as usize;
        let v = v.clamp(0, h as isize - 1) as usize;
        field[v * w + u]
    };
    let mut gx = vec![0i64; w * h];
    let mut gy = vec![0i64; w * h];
    for v in 0..h as isize {
        for u in 0..w as isize {
            let i = v as usize * w + u as usize;
            gx[i] = (at(u + 1, v - 1) + 2 * at(u + 1, v) + at(u + 1, v + 1))
                - (at(u - 1, v - 1) + 2 * at(u - 1, v) + at(u - 1, v + 1));
            gy[i] = (at(u - 1, v + 1) + 2 * at(u, v + 1) + at(u + 1, v + 1))
                - (at(u - 1, v - 1) + 2 * at(u, v - 1) + at(u + 1, v - 1));
        }
    }
    (gx, gy)
}

fn orientation(gx: i64, gy: i64) -> Orientation {
    let (ax, ay) = (gx.abs(), gy.abs());
    if ay * TAN_22_5_DEN <= ax * TAN_22_5_NUM {
        Orientation::Horizontal
    } else if ax * TAN_22_5_DEN <= ay * TAN_22_5_NUM {
        Orientation::Vertical
    } else if (gx > 0) == (gy > 0) {
        Orientation::Diagonal
    } else {
        Orientation::AntiDiagonal
    }
}

/// Per-pixel gradient magnitude in intensity units per pixel, after smoothing.
pub fn gradient_magnitude(img: &GrayImage) -> Result<Vec<f64>, VisionError> {
    check_size(img)?;
    let (gx, gy) = sobel(&blur(img), img.width(), img.height());
    Ok(gx
        .iter()
        .zip(&gy)
        .map(|(&x, &y)| ((x * x + y * y) as f64).sqrt() / GRADIENT_SCALE)
        .collect())
}

fn check_size(img: &GrayImage) -> Result<(), VisionError> {
    if img.width() < KERNEL_SIZE || img.height() < KERNEL_SIZE {
        return Err(VisionError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: KERNEL_SIZE,
        });
    }
    Ok(())
}

/// Binary edge map (pixels are 0 or 255).
pub fn canny(img: &GrayImage, low: f64, high: f64) -> Result<GrayImage, VisionError> {
    if !(0.0..=255.0).contains(&low) || !(0.0..=255.0).contains(&high) || low >= high {
        return Err(VisionError::InvalidThresholds { low, high });
    }
    check_size(img)?;
    let (w, h) = (img.width(), img.height());
    let (gx, gy) = sobel(&blur(img), w, h);
    let mag2: Vec<i64> = gx.iter().zip(&gy).map(|(&x, &y)| x * x + y * y).collect();

    let at = |u: isize, v: isize| -> i64 {
        if u < 0 || v < 0 || u >= w as isize || v >= h as isize {
            0
        } else {
            mag2[v as usize * w + u as usize]
        }
    };

    // non-maximum suppression on squared magnitudes
    let mut thin = vec![0i64; w * h];
    for v in 0..h as isize {
        for u in 0..w as isize {
            let i = v as usize * w + u as usize;
            let m = mag2[i];
            if m == 0 {
                continue;
            }
            let (du, dv) = match orientation(gx[i], gy[i]) {
                Orientation::Horizontal => (1, 0),
                Orientation::Vertical => (0, 1),
                Orientation::Diagonal => (1, 1),
                Orientation::AntiDiagonal => (1, -1),
            };
            if m >= at(u + du, v + dv) && m >= at(u - du, v - dv) {
                thin[i] = m;
            }
        }
    }

    let low2 = (low * GRADIENT_SCALE).powi(2);
    let high2 = (high * GRADIENT_SCALE).powi(2);
    let mut out = GrayImage::new(w, h);
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m > 0 && m as f64 >= high2 {
            out.set(i % w, i / w, 255);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (u, v) = ((i % w) as isize, (i / w) as isize);
        for dv in -1..=1 {
            for du in -1..=1 {
                let (nu, nv) = (u + du, v + dv);
                if nu < 0 || nv < 0 || nu >= w as isize || nv >= h as isize {
                    continue;
                }
                let (nu, nv) = (nu as usize, nv as usize);
                let j = nv * w + nu;
                if out.get(nu, nv) == 0 && thin[j] > 0 && thin[j] as f64 >= low2 {
                    out.set(nu, nv, 255);
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(out)
}
