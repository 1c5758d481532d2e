//! Diffusion inpainting of masked pixels.
//!
//! Masked pixels are repeatedly replaced by the mean of their available
//! 4-neighbors (unmasked, or masked but already assigned in an earlier
//! sweep) until the largest per-pixel change drops below the tolerance or
//! the iteration cap is reached. Sweeps are Jacobi-style: every update in a
//! sweep reads the previous sweep's values, so the result does not depend on
//! traversal order. Unmasked pixels never change.

use crate::error::{Error, Result};
use crate::pixels::PixelMask;
use crate::restore::Plane;

pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_TOLERANCE: f64 = 0.5;

pub fn inpaint(plane: &Plane, mask: &PixelMask) -> Result<Plane> {
    inpaint_with(plane, mask, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE)
}

pub fn inpaint_with(
    plane: &Plane,
    mask: &PixelMask,
    max_iters: usize,
    tolerance: f64,
) -> Result<Plane> {
    let (w, h) = (plane.width(), plane.height());
    if mask.width() != w || mask.height() != h {
        return Err(Error::invalid("mask dimensions differ from the plane"));
    }
    let total = w * h;
    if mask.count() == total {
        return Err(Error::FullyMasked);
    }
    if !mask.any() {
        return Ok(plane.clone());
    }

    let mut values = plane.data().to_vec();
    let mut assigned: Vec<bool> = mask.flags().iter().map(|&m| !m).collect();

    for _ in 0..max_iters {
        let prev_values = values.clone();
        let prev_assigned = assigned.clone();
        let mut max_change = 0f64;
        let mut grew = false;
        for row in 0..h {
            for col in 0..w {
                let idx = row * w + col;
                if !mask.get(row, col) {
                    continue;
                }
                let mut sum = 0f64;
                let mut n = 0usize;
                let mut push = |r: usize, c: usize| {
                    let j = r * w + c;
                    if prev_assigned[j] {
                        sum += prev_values[j];
                        n += 1;
                    }
                };
                if row > 0 {
                    push(row - 1, col);
                }
                if row + 1 < h {
                    push(row + 1, col);
                }
                if col > 0 {
                    push(row, col - 1);
                }
                if col + 1 < w {
                    push(row, col + 1);
                }
                if n == 0 {
                    continue; // wavefront has not reached this pixel yet
                }
                let new = sum / n as f64;
                if prev_assigned[idx] {
                    max_change = max_change.max((new - prev_values[idx]).abs());
                } else {
                    assigned[idx] = true;
                    grew = true;
                }
                values[idx] = new;
            }
        }
        if !grew && max_change < tolerance {
            break;
        }
    }
    Plane::new(w, h, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_from(values: &[f64], w: usize, h: usize) -> Plane {
        Plane::new(w, h, values.to_vec()).unwrap()
    }

    #[test]
    fn empty_mask_is_identity() {
        let p = plane_from(&[1.0, 2.0, 3.0, 4.0], 2, 2);
        let out = inpaint(&p, &PixelMask::empty(2, 2)).unwrap();
        assert_eq!(out.data(), p.data());
    }

    #[test]
    fn single_pixel_in_constant_surround_takes_that_value() {
        let mut values = vec![80.0; 25];
        values[12] = 999.0; // garbage to be replaced
        let p = plane_from(&values, 5, 5);
        let mut mask = PixelMask::empty(5, 5);
        mask.set(2, 2, true);
        let out = inpaint(&p, &mask).unwrap();
        assert!((out.get(2, 2) - 80.0).abs() < 1e-9);
        assert!((out.get(0, 0) - 80.0).abs() < 1e-12);
    }

    #[test]
    fn fully_masked_plane_is_an_error() {
        let p = plane_from(&[1.0; 9], 3, 3);
        let mask = PixelMask::new(3, 3, vec![true; 9]).unwrap();
        assert!(matches!(inpaint(&p, &mask), Err(Error::FullyMasked)));
    }

    /// Independent harmonic-interpolation oracle: Gauss-Seidel iterated far
    /// past the production tolerance.
    fn harmonic_oracle(plane: &Plane, mask: &PixelMask) -> Plane {
        let (w, h) = (plane.width(), plane.height());
        let mut values = plane.data().to_vec();
        // Seed masked pixels with the global mean of known pixels.
        let known: Vec<f64> = plane
            .data()
            .iter()
            .zip(mask.flags())
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
            .collect();
        let mean = known.iter().sum::<f64>() / known.len() as f64;
        for (v, &m) in values.iter_mut().zip(mask.flags()) {
            if m {
                *v = mean;
            }
        }
        for _ in 0..200_000 {
            let mut change = 0f64;
            for row in 0..h {
                for col in 0..w {
                    if !mask.get(row, col) {
                        continue;
                    }
                    let mut sum = 0f64;
                    let mut n = 0usize;
                    for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let (r, c) = (row as i64 + dr, col as i64 + dc);
                        if r >= 0 && r < h as i64 && c >= 0 && c < w as i64 {
                            sum += values[r as usize * w + c as usize];
                            n += 1;
                        }
                    }
                    let new = sum / n as f64;
                    change = change.max((new - values[row * w + col]).abs());
                    values[row * w + col] = new;
                }
            }
            if change < 1e-10 {
                break;
            }
        }
        Plane::new(w, h, values).unwrap()
    }

    #[test]
    fn masked_disk_in_linear_gradient_recovers_the_gradient() {
        // A linear ramp is harmonic, so diffusion must reproduce it inside
        // the masked disk up to the iteration tolerance.
        let (w, h) = (24, 24);
        let mut values = Vec::with_capacity(w * h);
        for r in 0..h {
            for c in 0..w {
                values.push(40.0 + 4.0 * r as f64 + 2.0 * c as f64);
            }
        }
        let truth = plane_from(&values, w, h);
        let mut mask = PixelMask::empty(w, h);
        for r in 0..h {
            for c in 0..w {
                if (r as f64 - 12.0).powi(2) + (c as f64 - 12.0).powi(2) <= 25.0 {
                    mask.set(r, c, true);
                }
            }
        }
        let mut damaged = truth.clone();
        for r in 0..h {
            for c in 0..w {
                if mask.get(r, c) {
                    damaged.set(r, c, 0.0);
                }
            }
        }
        let out = inpaint(&damaged, &mask).unwrap();
        let oracle = harmonic_oracle(&damaged, &mask);
        let mut err_truth = 0f64;
        let mut err_oracle = 0f64;
        for i in 0..w * h {
            err_truth = err_truth.max((out.data()[i] - truth.data()[i]).abs());
            err_oracle = err_oracle.max((out.data()[i] - oracle.data()[i]).abs());
        }
        // One quantization level on the 8-bit scale is 32 intensity units.
        assert!(err_truth <= 32.0, "gradient error {err_truth}");
        assert!(err_truth <= 4.0, "diffusion should track the ramp closely");
        assert!(err_oracle <= 4.0, "must agree with the harmonic oracle");
    }

    #[test]
    fn inpainting_twice_is_stable_within_tolerance() {
        let (w, h) = (16, 16);
        let mut values = vec![100.0; w * h];
        for (i, v) in values.iter_mut().enumerate() {
            *v += (i % 7) as f64;
        }
        let p = plane_from(&values, w, h);
        let mut mask = PixelMask::empty(w, h);
        for r in 5..9 {
            for c in 5..11 {
                mask.set(r, c, true);
            }
        }
        let once = inpaint(&p, &mask).unwrap();
        let twice = inpaint(&once, &mask).unwrap();
        for i in 0..w * h {
            assert!(
                (once.data()[i] - twice.data()[i]).abs() <= DEFAULT_TOLERANCE * 4.0,
                "re-inpainting moved a pixel more than the tolerance allows"
            );
        }
    }
}
