//! Deterministic synthetic test images.
//!
//! The channel experiments need natural-looking content (smooth shading,
//! large coherent regions, crisp edges) without shipping binary assets.
//! [`poster`] composites gradients, soft radial blobs and a few flat
//! rectangles, which matches the statistics the codec is designed for.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pixels::RgbImage;

/// Renders a poster-like RGB image. Same seed, same pixels.
pub fn poster(seed: u64, width: usize, height: usize) -> RgbImage {
    assert!(width >= 1 && height >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Background: a smooth diagonal gradient with per-channel endpoints.
    let ends: Vec<[f64; 2]> = (0..3)
        .map(|_| {
            [
                rng.random_range(30.0..110.0),
                rng.random_range(140.0..235.0),
            ]
        })
        .collect();

    // A handful of soft radial blobs.
    let blob_count = 3 + (seed % 3) as usize;
    let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..blob_count)
        .map(|_| {
            let cx = rng.random_range(0.0..width as f64);
            let cy = rng.random_range(0.0..height as f64);
            let radius = rng.random_range(0.15..0.45) * width.max(height) as f64;
            let tint = [
                rng.random_range(-80.0..80.0),
                rng.random_range(-80.0..80.0),
                rng.random_range(-80.0..80.0),
            ];
            (cx, cy, radius, tint)
        })
        .collect();

    // Flat rectangles give the hard edges posters have.
    let rect_count = 2 + (seed % 2) as usize;
    let rects: Vec<(usize, usize, usize, usize, [f64; 3])> = (0..rect_count)
        .map(|_| {
            let x0 = rng.random_range(0..width);
            let y0 = rng.random_range(0..height);
            let w = (width / 4).max(1);
            let h = (height / 5).max(1);
            let fill = [
                rng.random_range(0.0..255.0),
                rng.random_range(0.0..255.0),
                rng.random_range(0.0..255.0),
            ];
            (x0, y0, w, h, fill)
        })
        .collect();

    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let t = if width + height > 2 {
                (x + y) as f64 / (width + height - 2) as f64
            } else {
                0.0
            };
            let mut rgb = [0f64; 3];
            for (c, val) in rgb.iter_mut().enumerate() {
                *val = ends[c][0] + (ends[c][1] - ends[c][0]) * t;
            }
            for &(cx, cy, radius, tint) in &blobs {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                let w = (-d2 / (2.0 * radius * radius)).exp();
                for (c, val) in rgb.iter_mut().enumerate() {
                    *val += tint[c] * w;
                }
            }
            for &(x0, y0, w, h, fill) in &rects {
                if x >= x0 && x < x0 + w && y >= y0 && y < y0 + h {
                    rgb = fill;
                }
            }
            pixels.push([
                rgb[0].clamp(0.0, 255.0).round() as u8,
                rgb[1].clamp(0.0, 255.0).round() as u8,
                rgb[2].clamp(0.0, 255.0).round() as u8,
            ]);
        }
    }
    RgbImage::new(width, height, pixels).expect("dimensions checked above")
}

/// A pure linear gradient, handy for inpainting oracles.
pub fn gradient(width: usize, height: usize, from: f64, to: f64) -> RgbImage {
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let t = if width + height > 2 {
                (x + y) as f64 / (width + height - 2) as f64
            } else {
                0.0
            };
            let v = (from + (to - from) * t).clamp(0.0, 255.0).round() as u8;
            pixels.push([v, v, v]);
        }
    }
    RgbImage::new(width, height, pixels).expect("dimensions checked by caller")
}
