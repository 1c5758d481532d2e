//! Discoloration detection from cross-channel difference statistics.
//!
//! Because each (color, level) stream is encoded independently, a corrupted
//! region almost always disturbs exactly one channel. Such pixels land in
//! rare bins of the pairwise difference histograms R-G, G-B and R-B. Each
//! pair marks the pixels whose difference value ranks among its `t`
//! least-frequent bins (out of the 15 possible values -7..=7); a channel's
//! mask is the intersection of the marks of the two pairs it participates
//! in, then dilated by one pixel.

use crate::error::{Error, Result};
use crate::pixels::{PixelMask, QuantizedChannel};

/// Number of distinct quantized difference values (-7..=7).
pub const DIFF_BINS: usize = 15;

/// Histogram of `a - b` over the 15 possible level differences.
pub fn difference_histogram(a: &QuantizedChannel, b: &QuantizedChannel) -> [u64; DIFF_BINS] {
    debug_assert_eq!(a.width(), b.width());
    debug_assert_eq!(a.height(), b.height());
    let mut bins = [0u64; DIFF_BINS];
    for (&x, &y) in a.levels().iter().zip(b.levels()) {
        bins[(x as i32 - y as i32 + 7) as usize] += 1;
    }
    bins
}

/// Bins ordered rarest-first: by count ascending, ties broken toward larger
/// |difference| (big jumps are likelier errors), then positive before
/// negative for determinism.
fn rarity_order(bins: &[u64; DIFF_BINS]) -> [usize; DIFF_BINS] {
    let mut order: Vec<usize> = (0..DIFF_BINS).collect();
    order.sort_by_key(|&i| {
        let diff = i as i64 - 7;
        (bins[i], std::cmp::Reverse(diff.abs()), std::cmp::Reverse(diff))
    });
    order.try_into().expect("fixed length")
}

fn pair_marks(a: &QuantizedChannel, b: &QuantizedChannel, t: usize) -> Vec<bool> {
    let bins = difference_histogram(a, b);
    let order = rarity_order(&bins);
    let mut selected = [false; DIFF_BINS];
    for &bin in order.iter().take(t) {
        selected[bin] = true;
    }
    a.levels()
        .iter()
        .zip(b.levels())
        .map(|(&x, &y)| selected[(x as i32 - y as i32 + 7) as usize])
        .collect()
}

/// Flags suspect pixels per channel. `t` counts least-frequent difference
/// bins per pair and is capped at 15 (all bins).
pub fn detect_discoloration(
    r: &QuantizedChannel,
    g: &QuantizedChannel,
    b: &QuantizedChannel,
    t: usize,
) -> Result<[PixelMask; 3]> {
    let (w, h) = (r.width(), r.height());
    if g.width() != w || g.height() != h || b.width() != w || b.height() != h {
        return Err(Error::invalid("channel dimensions differ"));
    }
    let t = t.min(DIFF_BINS);
    let rg = pair_marks(r, g, t);
    let gb = pair_marks(g, b, t);
    let rb = pair_marks(r, b, t);

    let intersect = |x: &[bool], y: &[bool]| -> Result<PixelMask> {
        let flags = x.iter().zip(y).map(|(&a, &b)| a && b).collect();
        Ok(PixelMask::new(w, h, flags)?.dilate())
    };
    Ok([
        intersect(&rg, &rb)?,
        intersect(&rg, &gb)?,
        intersect(&gb, &rb)?,
    ])
}

/// Per-channel union of detected and decoder-provided masks.
pub fn combine_masks(
    detected: &[PixelMask; 3],
    decoder_masks: &[PixelMask; 3],
) -> Result<[PixelMask; 3]> {
    Ok([
        detected[0].union(&decoder_masks[0])?,
        detected[1].union(&decoder_masks[1])?,
        detected[2].union(&decoder_masks[2])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixels::ColorTag;

    fn uniform(w: usize, h: usize, level: u8, color: ColorTag) -> QuantizedChannel {
        QuantizedChannel::new(w, h, color, vec![level; w * h]).unwrap()
    }

    #[test]
    fn clean_uniform_image_yields_empty_masks_below_t15() {
        let r = uniform(16, 16, 4, ColorTag::R);
        let g = uniform(16, 16, 4, ColorTag::G);
        let b = uniform(16, 16, 4, ColorTag::B);
        for t in [0usize, 1, 2, 7, 14] {
            let masks = detect_discoloration(&r, &g, &b, t).unwrap();
            for m in &masks {
                assert!(!m.any(), "t={t} must leave a uniform image unmasked");
            }
        }
    }

    #[test]
    fn t15_selects_every_bin_and_masks_everything() {
        let r = uniform(8, 8, 4, ColorTag::R);
        let g = uniform(8, 8, 4, ColorTag::G);
        let b = uniform(8, 8, 4, ColorTag::B);
        let masks = detect_discoloration(&r, &g, &b, 15).unwrap();
        for m in &masks {
            assert_eq!(m.count(), 64);
        }
        // Values above 15 behave like 15.
        let clamped = detect_discoloration(&r, &g, &b, 18).unwrap();
        assert_eq!(clamped[0], masks[0]);
    }

    #[test]
    fn corrupted_block_in_one_channel_is_attributed_to_it() {
        // Uniform mid-gray with an 8x8 block forced to level 7 in R only.
        // The rare bins of R-G and R-B are the corruption; G-B stays
        // single-binned, so with the 13 empty bins ranked first the block
        // bin needs t = 14 to enter the selection.
        let (w, h) = (64, 64);
        let mut r_levels = vec![4u8; w * h];
        for row in 8..16 {
            for col in 24..32 {
                r_levels[row * w + col] = 7;
            }
        }
        let r = QuantizedChannel::new(w, h, ColorTag::R, r_levels).unwrap();
        let g = uniform(w, h, 4, ColorTag::G);
        let b = uniform(w, h, 4, ColorTag::B);
        let masks = detect_discoloration(&r, &g, &b, 14).unwrap();
        for row in 8..16 {
            for col in 24..32 {
                assert!(masks[0].get(row, col), "block pixel ({row},{col}) missed");
            }
        }
        assert!(!masks[1].any(), "G must stay clean");
        assert!(!masks[2].any(), "B must stay clean");
        // The dilated mask may exceed the block by one pixel ring only.
        assert!(masks[0].count() <= 10 * 10);
    }

    #[test]
    fn combine_masks_is_per_channel_union() {
        let empty = PixelMask::empty(4, 4);
        let mut one = PixelMask::empty(4, 4);
        one.set(1, 2, true);
        let combined = combine_masks(
            &[empty.clone(), one.clone(), empty.clone()],
            &[one.clone(), one.clone(), empty.clone()],
        )
        .unwrap();
        assert_eq!(combined[0].count(), 1);
        assert_eq!(combined[1].count(), 1, "overlap counts once");
        assert_eq!(combined[2].count(), 0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let r = uniform(4, 4, 1, ColorTag::R);
        let g = uniform(5, 4, 1, ColorTag::G);
        let b = uniform(4, 4, 1, ColorTag::B);
        assert!(detect_discoloration(&r, &g, &b, 3).is_err());
    }
}
