//! Adaptive median smoothing restricted to flagged regions.
//!
//! For pixels inside the (1-pixel dilated) error regions only: grow the
//! window from 3x3 while the window median is a window extremum, up to
//! `max_window`; then replace the pixel by the median if the pixel itself is
//! a window extremum, otherwise keep it. Windows clip at the borders.

use crate::error::{Error, Result};
use crate::pixels::{PixelMask, RgbImage};

pub const DEFAULT_MAX_WINDOW: usize = 7;

pub fn adaptive_median(
    image: &RgbImage,
    regions: &[PixelMask; 3],
    max_window: usize,
) -> Result<RgbImage> {
    if max_window < 3 || max_window.is_multiple_of(2) {
        return Err(Error::invalid("max window must be odd and at least 3"));
    }
    let (w, h) = (image.width(), image.height());
    for m in regions.iter() {
        if m.width() != w || m.height() != h {
            return Err(Error::invalid("region mask dimensions differ"));
        }
    }
    let dilated: Vec<PixelMask> = regions.iter().map(PixelMask::dilate).collect();

    let mut out = image.clone();
    let mut window_buf = Vec::with_capacity(max_window * max_window);
    for row in 0..h {
        for col in 0..w {
            for ch in 0..3 {
                if !dilated[ch].get(row, col) {
                    continue;
                }
                let filtered =
                    adaptive_median_pixel(image, row, col, ch, max_window, &mut window_buf);
                let mut px = out.pixel(row, col);
                px[ch] = filtered;
                out.set_pixel(row, col, px);
            }
        }
    }
    Ok(out)
}

fn adaptive_median_pixel(
    image: &RgbImage,
    row: usize,
    col: usize,
    ch: usize,
    max_window: usize,
    buf: &mut Vec<u8>,
) -> u8 {
    let (w, h) = (image.width(), image.height());
    let z = image.pixel(row, col)[ch];
    let mut window = 3usize;
    loop {
        buf.clear();
        let radius = (window / 2) as i64;
        for dr in -radius..=radius {
            for dc in -radius..=radius {
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r >= 0 && r < h as i64 && c >= 0 && c < w as i64 {
                    buf.push(image.pixel(r as usize, c as usize)[ch]);
                }
            }
        }
        buf.sort_unstable();
        let (zmin, zmax) = (buf[0], buf[buf.len() - 1]);
        let zmed = buf[buf.len() / 2];
        if (zmed == zmin || zmed == zmax) && window + 2 <= max_window {
            window += 2;
            continue;
        }
        return if z == zmin || z == zmax { zmed } else { z };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_mask(w: usize, h: usize) -> [PixelMask; 3] {
        let m = PixelMask::new(w, h, vec![true; w * h]).unwrap();
        [m.clone(), m.clone(), m]
    }

    fn empty_mask(w: usize, h: usize) -> [PixelMask; 3] {
        let m = PixelMask::empty(w, h);
        [m.clone(), m.clone(), m]
    }

    #[test]
    fn empty_regions_leave_the_image_unchanged() {
        let img = crate::synth::poster(4, 10, 10);
        let out = adaptive_median(&img, &empty_mask(10, 10), 7).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn isolated_impulse_in_flagged_constant_region_is_removed() {
        let mut img = RgbImage::filled(9, 9, [100, 100, 100]).unwrap();
        img.set_pixel(4, 4, [255, 100, 100]);
        let out = adaptive_median(&img, &full_mask(9, 9), 7).unwrap();
        assert_eq!(out.pixel(4, 4), [100, 100, 100]);
        assert_eq!(out.pixel(0, 0), [100, 100, 100]);
    }

    #[test]
    fn non_extremum_pixels_are_kept() {
        // A gradient has no impulse extremes away from the corners; interior
        // pixels must pass through untouched.
        let img = crate::synth::gradient(9, 9, 10.0, 200.0);
        let out = adaptive_median(&img, &full_mask(9, 9), 7).unwrap();
        for r in 2..7 {
            for c in 2..7 {
                assert_eq!(out.pixel(r, c), img.pixel(r, c), "({r},{c}) changed");
            }
        }
    }

    /// Reference implementation written directly from the window-growing
    /// description, evaluated per pixel with fresh state.
    fn oracle_pixel(img: &RgbImage, row: usize, col: usize, ch: usize, max_window: usize) -> u8 {
        let (w, h) = (img.width(), img.height());
        let mut size = 3usize;
        loop {
            let radius = (size / 2) as i64;
            let mut vals = Vec::new();
            for r in row as i64 - radius..=row as i64 + radius {
                for c in col as i64 - radius..=col as i64 + radius {
                    if r >= 0 && r < h as i64 && c >= 0 && c < w as i64 {
                        vals.push(img.pixel(r as usize, c as usize)[ch]);
                    }
                }
            }
            vals.sort();
            let med = vals[vals.len() / 2];
            let min = *vals.first().unwrap();
            let max = *vals.last().unwrap();
            if med > min && med < max {
                let z = img.pixel(row, col)[ch];
                return if z > min && z < max { z } else { med };
            }
            if size + 2 > max_window {
                let z = img.pixel(row, col)[ch];
                return if z > min && z < max { z } else { med };
            }
            size += 2;
        }
    }

    #[test]
    fn salt_and_pepper_fixture_matches_the_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut img = crate::synth::poster(11, 20, 14);
        for _ in 0..40 {
            let r = rng.random_range(0..14);
            let c = rng.random_range(0..20);
            let v = if rng.random_bool(0.5) { 255 } else { 0 };
            img.set_pixel(r, c, [v, v, v]);
        }
        let out = adaptive_median(&img, &full_mask(20, 14), 7).unwrap();
        for r in 0..14 {
            for c in 0..20 {
                for ch in 0..3 {
                    assert_eq!(
                        out.pixel(r, c)[ch],
                        oracle_pixel(&img, r, c, ch, 7),
                        "mismatch at ({r},{c},{ch})"
                    );
                }
            }
        }
    }

    #[test]
    fn region_restriction_only_touches_dilated_flags() {
        let mut img = RgbImage::filled(9, 9, [50, 50, 50]).unwrap();
        img.set_pixel(1, 1, [255, 50, 50]); // impulse outside the region
        img.set_pixel(6, 6, [255, 50, 50]); // impulse inside the region
        let mut region = PixelMask::empty(9, 9);
        region.set(6, 6, true);
        let regions = [region, PixelMask::empty(9, 9), PixelMask::empty(9, 9)];
        let out = adaptive_median(&img, &regions, 7).unwrap();
        assert_eq!(out.pixel(1, 1), [255, 50, 50], "untouched outside region");
        assert_eq!(out.pixel(6, 6), [50, 50, 50], "repaired inside region");
    }
}
