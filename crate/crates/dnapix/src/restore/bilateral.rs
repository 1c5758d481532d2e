//! Edge-preserving bilateral smoothing.
//!
//! Each output pixel is the normalized weighted mean of its window, with
//! weights `exp(-((i-k)^2 + (j-l)^2) / 2*sigma_d^2 - ||I[i,j] - I[k,l]||^2 / 2*sigma_r^2)`.
//! The intensity norm is Euclidean over the three channels, so one weight
//! serves all channels of a pixel. Windows are clipped at the borders; no
//! reflection padding.

use crate::error::{Error, Result};
use crate::pixels::RgbImage;
use crate::restore::Plane;

/// Filters three channel planes jointly. `window` is the full side length of
/// the square neighborhood and must be odd.
pub fn bilateral_filter_planes(
    planes: &[Plane; 3],
    sigma_d2: f64,
    sigma_r2: f64,
    window: usize,
) -> Result<[Plane; 3]> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::invalid("window must be odd and at least 1"));
    }
    if sigma_d2 <= 0.0 || sigma_r2 <= 0.0 {
        return Err(Error::invalid("sigmas must be positive"));
    }
    let (w, h) = (planes[0].width(), planes[0].height());
    for p in planes.iter() {
        if p.width() != w || p.height() != h {
            return Err(Error::invalid("plane dimensions differ"));
        }
    }
    let radius = (window / 2) as i64;

    // Spatial weights depend only on the offset; precompute the stencil.
    let side = window;
    let mut spatial = vec![0f64; side * side];
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let idx = ((dr + radius) as usize) * side + (dc + radius) as usize;
            spatial[idx] = (-((dr * dr + dc * dc) as f64) / (2.0 * sigma_d2)).exp();
        }
    }

    let mut out = [
        Plane::new(w, h, vec![0.0; w * h])?,
        Plane::new(w, h, vec![0.0; w * h])?,
        Plane::new(w, h, vec![0.0; w * h])?,
    ];
    for row in 0..h as i64 {
        for col in 0..w as i64 {
            let center = [
                planes[0].get(row as usize, col as usize),
                planes[1].get(row as usize, col as usize),
                planes[2].get(row as usize, col as usize),
            ];
            let mut acc = [0f64; 3];
            let mut norm = 0f64;
            for dr in -radius..=radius {
                let r = row + dr;
                if r < 0 || r >= h as i64 {
                    continue;
                }
                for dc in -radius..=radius {
                    let c = col + dc;
                    if c < 0 || c >= w as i64 {
                        continue;
                    }
                    let sample = [
                        planes[0].get(r as usize, c as usize),
                        planes[1].get(r as usize, c as usize),
                        planes[2].get(r as usize, c as usize),
                    ];
                    let color_d2: f64 = center
                        .iter()
                        .zip(&sample)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    let weight = spatial
                        [((dr + radius) as usize) * side + (dc + radius) as usize]
                        * (-color_d2 / (2.0 * sigma_r2)).exp();
                    for ch in 0..3 {
                        acc[ch] += sample[ch] * weight;
                    }
                    norm += weight;
                }
            }
            for ch in 0..3 {
                out[ch].set(row as usize, col as usize, acc[ch] / norm);
            }
        }
    }
    Ok(out)
}

/// Convenience wrapper over 8-bit images; output is rounded and clamped.
pub fn bilateral_filter(
    image: &RgbImage,
    sigma_d2: f64,
    sigma_r2: f64,
    window: usize,
) -> Result<RgbImage> {
    let planes = Plane::from_image(image);
    let filtered = bilateral_filter_planes(&planes, sigma_d2, sigma_r2, window)?;
    Plane::to_image(&filtered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    /// Direct double-loop evaluation of the two filter equations, written
    /// independently of the production code path.
    fn oracle(planes: &[Plane; 3], sigma_d2: f64, sigma_r2: f64, window: usize) -> [Plane; 3] {
        let (w, h) = (planes[0].width(), planes[0].height());
        let radius = (window / 2) as i64;
        let mut out = [
            Plane::new(w, h, vec![0.0; w * h]).unwrap(),
            Plane::new(w, h, vec![0.0; w * h]).unwrap(),
            Plane::new(w, h, vec![0.0; w * h]).unwrap(),
        ];
        for i in 0..h as i64 {
            for j in 0..w as i64 {
                let mut num = [0f64; 3];
                let mut den = 0f64;
                for k in (i - radius)..=(i + radius) {
                    for l in (j - radius)..=(j + radius) {
                        if k < 0 || k >= h as i64 || l < 0 || l >= w as i64 {
                            continue;
                        }
                        let mut color = 0f64;
                        for p in planes.iter() {
                            let d = p.get(i as usize, j as usize) - p.get(k as usize, l as usize);
                            color += d * d;
                        }
                        let wgt = (-(((i - k).pow(2) + (j - l).pow(2)) as f64)
                            / (2.0 * sigma_d2)
                            - color / (2.0 * sigma_r2))
                            .exp();
                        for (ch, p) in planes.iter().enumerate() {
                            num[ch] += p.get(k as usize, l as usize) * wgt;
                        }
                        den += wgt;
                    }
                }
                for ch in 0..3 {
                    out[ch].set(i as usize, j as usize, num[ch] / den);
                }
            }
        }
        out
    }

    #[test]
    fn constant_image_is_a_fixed_point() {
        let img = RgbImage::filled(7, 5, [90, 40, 200]).unwrap();
        let out = bilateral_filter(&img, 45.0, 45.0, 9).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn window_one_is_identity() {
        let img = synth::poster(2, 12, 9);
        let out = bilateral_filter(&img, 45.0, 45.0, 1).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn matches_brute_force_oracle_to_1e9_relative() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let pixels: Vec<[u8; 3]> = (0..64)
            .map(|_| [rng.random(), rng.random(), rng.random()])
            .collect();
        let img = RgbImage::new(8, 8, pixels).unwrap();
        let planes = Plane::from_image(&img);
        let ours = bilateral_filter_planes(&planes, 45.0, 45.0, 9).unwrap();
        let reference = oracle(&planes, 45.0, 45.0, 9);
        for ch in 0..3 {
            for i in 0..64 {
                let a = ours[ch].data()[i];
                let b = reference[ch].data()[i];
                let rel = (a - b).abs() / b.abs().max(1e-300);
                assert!(rel < 1e-9, "channel {ch} pixel {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn output_stays_within_window_bounds() {
        let img = synth::poster(5, 16, 11);
        let planes = Plane::from_image(&img);
        let out = bilateral_filter_planes(&planes, 45.0, 45.0, 5).unwrap();
        let (w, h) = (img.width(), img.height());
        for ch in 0..3 {
            for row in 0..h {
                for col in 0..w {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for dr in -2i64..=2 {
                        for dc in -2i64..=2 {
                            let (r, c) = (row as i64 + dr, col as i64 + dc);
                            if r >= 0 && r < h as i64 && c >= 0 && c < w as i64 {
                                let v = planes[ch].get(r as usize, c as usize);
                                lo = lo.min(v);
                                hi = hi.max(v);
                            }
                        }
                    }
                    let v = out[ch].get(row, col);
                    assert!(
                        v >= lo - 1e-9 && v <= hi + 1e-9,
                        "convex combination violated at ({row},{col})"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_even_window_and_bad_sigmas() {
        let img = RgbImage::filled(4, 4, [0, 0, 0]).unwrap();
        assert!(bilateral_filter(&img, 45.0, 45.0, 4).is_err());
        assert!(bilateral_filter(&img, 0.0, 45.0, 3).is_err());
        assert!(bilateral_filter(&img, 45.0, -1.0, 3).is_err());
    }
}
