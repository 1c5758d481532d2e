//! Quality metrics: PSNR, detection precision/recall and the evaluation
//! report emitted by the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixels::{PixelMask, RgbImage};

/// Mean squared error over all pixels and channels.
pub fn mse(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::invalid("image dimensions differ"));
    }
    let mut total = 0f64;
    for (pa, pb) in a.pixels().iter().zip(b.pixels()) {
        for ch in 0..3 {
            let d = pa[ch] as f64 - pb[ch] as f64;
            total += d * d;
        }
    }
    Ok(total / (3 * a.width() * a.height()) as f64)
}

/// `10 * log10(255^2 / MSE)` in dB; `None` for identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<Option<f64>> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(None);
    }
    Ok(Some(10.0 * (255.0f64 * 255.0 / mse).log10()))
}

/// Precision and recall of a mask against ground-truth flags, micro-averaged
/// over all (pixel, channel) slots. `None` when there is no ground truth to
/// recall or nothing was retrieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

pub fn precision_recall(masks: &[PixelMask; 3], truth: &[PixelMask; 3]) -> PrecisionRecall {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fnn = 0u64;
    for (mask, truth) in masks.iter().zip(truth) {
        for (&m, &t) in mask.flags().iter().zip(truth.flags()) {
            match (m, t) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fnn += 1,
                (false, false) => {}
            }
        }
    }
    PrecisionRecall {
        precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
        recall: (tp + fnn > 0).then(|| tp as f64 / (tp + fnn) as f64),
        true_positives: tp,
        false_positives: fp,
        false_negatives: fnn,
    }
}

/// Ground-truth corrupted (pixel, channel) slots: wherever the corrupted
/// image differs from the quantized reference.
pub fn corruption_truth(corrupted: &RgbImage, quantized: &RgbImage) -> Result<[PixelMask; 3]> {
    if corrupted.width() != quantized.width() || corrupted.height() != quantized.height() {
        return Err(Error::invalid("image dimensions differ"));
    }
    let (w, h) = (corrupted.width(), corrupted.height());
    let mut masks = [
        PixelMask::empty(w, h),
        PixelMask::empty(w, h),
        PixelMask::empty(w, h),
    ];
    for row in 0..h {
        for col in 0..w {
            let a = corrupted.pixel(row, col);
            let b = quantized.pixel(row, col);
            for ch in 0..3 {
                if a[ch] != b[ch] {
                    masks[ch].set(row, col, true);
                }
            }
        }
    }
    Ok(masks)
}

/// Oligo-level accounting mirrored from the decode report and damage log.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OligoAccounting {
    pub total: u64,
    pub clean: u64,
    pub erroneous: u64,
    pub missing: u64,
    pub corrected: u64,
    pub discarded: u64,
}

impl OligoAccounting {
    pub fn consistent(&self) -> bool {
        self.total == self.clean + self.erroneous + self.missing
    }
}

/// The machine-readable evaluation report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub psnr_corrupted_vs_quantized: Option<f64>,
    pub psnr_restored_vs_quantized: Option<f64>,
    pub psnr_corrupted_vs_original: Option<f64>,
    pub psnr_restored_vs_original: Option<f64>,
    pub psnr_quantized_vs_original: Option<f64>,
    /// True when a pair of images compared bit-identical (infinite PSNR).
    pub identical_pairs: Vec<String>,
    pub detection: Option<PrecisionRecall>,
    pub oligos: Option<OligoAccounting>,
    pub nucleotides_total: Option<u64>,
    pub source_bits: Option<u64>,
    pub bits_per_nt: Option<f64>,
}

impl MetricsReport {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("metrics serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }
}
