//! Image repair: discoloration detection, diffusion inpainting, bilateral
//! smoothing and adaptive median filtering, wired into one pipeline.

mod bilateral;
mod detect;
mod inpaint;
mod median;

pub use bilateral::{bilateral_filter, bilateral_filter_planes};
pub use detect::{combine_masks, detect_discoloration, difference_histogram, DIFF_BINS};
pub use inpaint::{inpaint, inpaint_with, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};
pub use median::{adaptive_median, DEFAULT_MAX_WINDOW};

use crate::error::{Error, Result};
use crate::pixels::{
    dequantize_channel, ChannelMatrix, PixelMask, QuantizedChannel, RgbImage,
};

/// A floating-point channel plane used by the filter stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Plane> {
        if data.len() != width * height {
            return Err(Error::invalid("plane size mismatch"));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn from_channel(channel: &ChannelMatrix) -> Plane {
        Plane {
            width: channel.width(),
            height: channel.height(),
            data: channel.values().iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn from_image(image: &RgbImage) -> [Plane; 3] {
        let make = |i: usize| Plane {
            width: image.width(),
            height: image.height(),
            data: image.pixels().iter().map(|p| p[i] as f64).collect(),
        };
        [make(0), make(1), make(2)]
    }

    pub fn to_image(planes: &[Plane; 3]) -> Result<RgbImage> {
        let (w, h) = (planes[0].width, planes[0].height);
        for p in planes.iter() {
            if p.width != w || p.height != h {
                return Err(Error::invalid("plane dimensions differ"));
            }
        }
        let pixels = (0..w * h)
            .map(|i| {
                [
                    planes[0].data[i].round().clamp(0.0, 255.0) as u8,
                    planes[1].data[i].round().clamp(0.0, 255.0) as u8,
                    planes[2].data[i].round().clamp(0.0, 255.0) as u8,
                ]
            })
            .collect();
        RgbImage::new(w, h, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.width + col] = v;
    }
}

/// Tunables for the three-stage repair pipeline.
#[derive(Debug, Clone)]
pub struct RestoreParams {
    /// Least-frequent difference bins per channel pair (capped at 15).
    pub t: usize,
    pub sigma_d2: f64,
    pub sigma_r2: f64,
    /// Bilateral window side length, odd.
    pub window: usize,
    pub inpaint_max_iters: usize,
    pub inpaint_tolerance: f64,
    /// Adaptive median growth limit, odd.
    pub median_max_window: usize,
    /// Extra smoothing passes over the flagged regions.
    pub median_passes: usize,
}

impl Default for RestoreParams {
    fn default() -> Self {
        RestoreParams {
            // Largest t with no false positives on clean natural content in
            // calibration runs; every falsely flagged pixel costs quality
            // because inpainting replaces it with a diffusion guess. With 15
            // difference bins per pair, values of 15 and up select every bin
            // and mask the whole frame.
            t: 6,
            sigma_d2: 45.0,
            sigma_r2: 45.0,
            window: 9,
            inpaint_max_iters: DEFAULT_MAX_ITERS,
            inpaint_tolerance: DEFAULT_TOLERANCE,
            median_max_window: DEFAULT_MAX_WINDOW,
            median_passes: 1,
        }
    }
}

/// Output of [`restore`], including intermediate stages for inspection.
#[derive(Debug, Clone)]
pub struct Restored {
    pub image: RgbImage,
    pub detected: [PixelMask; 3],
    pub combined: [PixelMask; 3],
    pub inpainted: RgbImage,
    pub smoothed: RgbImage,
}

/// Repairs a decoded image: detect -> combine masks -> inpaint -> bilateral
/// -> adaptive median over the flagged regions.
pub fn restore(
    channels: &[QuantizedChannel; 3],
    decoder_masks: &[PixelMask; 3],
    params: &RestoreParams,
) -> Result<Restored> {
    let detected = detect_discoloration(&channels[0], &channels[1], &channels[2], params.t)?;
    let combined = combine_masks(&detected, decoder_masks)?;

    let mut planes = Vec::with_capacity(3);
    for (channel, mask) in channels.iter().zip(&combined) {
        let plane = Plane::from_channel(&dequantize_channel(channel));
        planes.push(inpaint_with(
            &plane,
            mask,
            params.inpaint_max_iters,
            params.inpaint_tolerance,
        )?);
    }
    let planes: [Plane; 3] = planes.try_into().expect("three channels");
    let inpainted = Plane::to_image(&planes)?;

    let smoothed_planes =
        bilateral_filter_planes(&planes, params.sigma_d2, params.sigma_r2, params.window)?;
    let smoothed = Plane::to_image(&smoothed_planes)?;

    let mut image = smoothed.clone();
    for _ in 0..params.median_passes {
        image = adaptive_median(&image, &combined, params.median_max_window)?;
    }

    Ok(Restored {
        image,
        detected,
        combined,
        inpainted,
        smoothed,
    })
}
