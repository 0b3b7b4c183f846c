//! Procedural handwritten-style digit images in the MNIST layout (28×28, u8).
//!
//! Each digit is a fixed set of strokes in a unit box; every sample gets
//! control-point jitter, a random affine warp and a random pen width before
//! being rasterized with anti-aliased edges. Used as a stand-in wherever the
//! real MNIST files are not available.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::idx::{write_idx_images, write_idx_labels};
use crate::error::Result;
use crate::rng::seeded;

pub const SIDE: usize = 28;

type Stroke = Vec<(f64, f64)>;

fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from_deg: f64, to_deg: f64) -> Stroke {
    let steps = (((to_deg - from_deg).abs() / 15.0).ceil() as usize).max(2);
    (0..=steps)
        .map(|i| {
            let a = (from_deg + (to_deg - from_deg) * i as f64 / steps as f64) * PI / 180.0;
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect()
}

fn glyph(digit: u8) -> Vec<Stroke> {
    match digit {
        0 => vec![arc(0.5, 0.5, 0.26, 0.38, 0.0, 360.0)],
        1 => vec![vec![(0.38, 0.24), (0.52, 0.1), (0.52, 0.9)]],
        2 => vec![{
            let mut s = arc(0.5, 0.32, 0.25, 0.2, 190.0, 390.0);
            s.extend([(0.25, 0.88), (0.78, 0.88)]);
            s
        }],
        3 => vec![arc(0.48, 0.3, 0.24, 0.19, 200.0, 450.0), arc(0.48, 0.69, 0.26, 0.2, 270.0, 520.0)],
        4 => vec![vec![(0.66, 0.9), (0.66, 0.1), (0.2, 0.64), (0.82, 0.64)]],
        5 => vec![vec![(0.74, 0.12), (0.34, 0.12), (0.3, 0.46)], arc(0.5, 0.64, 0.25, 0.24, 220.0, 500.0)],
        6 => vec![vec![(0.68, 0.1), (0.45, 0.28), (0.31, 0.5), (0.29, 0.68)], arc(0.5, 0.68, 0.21, 0.2, 0.0, 360.0)],
        7 => vec![vec![(0.22, 0.12), (0.78, 0.12), (0.42, 0.9)]],
        8 => vec![arc(0.5, 0.3, 0.2, 0.18, 0.0, 360.0), arc(0.5, 0.68, 0.24, 0.21, 0.0, 360.0)],
        9 => vec![arc(0.5, 0.32, 0.21, 0.2, 0.0, 360.0), vec![(0.71, 0.32), (0.68, 0.6), (0.6, 0.9)]],
        _ => panic!("digit {digit} out of range"),
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Renders one randomized sample of `digit` as SIDE×SIDE row-major pixels.
pub fn render_digit<R: Rng + ?Sized>(digit: u8, rng: &mut R) -> Vec<u8> {
    let jitter = Normal::new(0.0, 0.015).expect("valid sigma");
    let theta: f64 = rng.random_range(-0.2..0.2);
    let (sx, sy): (f64, f64) = (rng.random_range(0.85..1.1), rng.random_range(0.85..1.1));
    let shear: f64 = rng.random_range(-0.2..0.2);
    let (tx, ty): (f64, f64) = (rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
    let half_width: f64 = rng.random_range(1.0..1.8);
    let (c, s) = (theta.cos(), theta.sin());
    let box_px = 20.0;
    let offset = (SIDE as f64 - box_px) / 2.0;

    let strokes: Vec<Stroke> = glyph(digit)
        .into_iter()
        .map(|stroke| {
            stroke
                .into_iter()
                .map(|(x, y)| {
                    let (x, y) = (x + jitter.sample(rng) - 0.5, y + jitter.sample(rng) - 0.5);
                    let (x, y) = (sx * (x + shear * y), sy * y);
                    let (x, y) = (c * x - s * y + 0.5 + tx, s * x + c * y + 0.5 + ty);
                    (x * box_px + offset, y * box_px + offset)
                })
                .collect()
        })
        .collect();

    let mut img = vec![0u8; SIDE * SIDE];
    for py in 0..SIDE {
        for px in 0..SIDE {
            let p = (px as f64 + 0.5, py as f64 + 0.5);
            let dist = strokes
                .iter()
                .flat_map(|st| st.windows(2).map(move |w| segment_distance(p, w[0], w[1])))
                .fold(f64::INFINITY, f64::min);
            let ink = (half_width + 0.5 - dist).clamp(0.0, 1.0);
            img[py * SIDE + px] = (ink * 255.0).round() as u8;
        }
    }
    img
}

/// `per_class` images of each digit 0–9, interleaved by class.
pub fn render_digits(per_class: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
    let mut rng = seeded(seed);
    let mut images = Vec::with_capacity(per_class * 10);
    let mut labels = Vec::with_capacity(per_class * 10);
    for _ in 0..per_class {
        for d in 0..10u8 {
            images.push(render_digit(d, &mut rng));
            labels.push(d);
        }
    }
    (images, labels)
}

/// Writes `images.idx` and `labels.idx` into `dir`.
pub fn write_digit_idx(dir: impl AsRef<Path>, per_class: usize, seed: u64) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let (images, labels) = render_digits(per_class, seed);
    let (pi, pl) = (dir.join("images.idx"), dir.join("labels.idx"));
    write_idx_images(&pi, &images, SIDE, SIDE)?;
    write_idx_labels(&pl, &labels)?;
    Ok((pi, pl))
}
