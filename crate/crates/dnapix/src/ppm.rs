//! Binary PPM (P6, maxval 255) interchange, plus optional PNG input.
//!
//! P6 is the mandatory on-disk format and round-trips byte-exactly through
//! [`write_ppm`] / [`read_ppm`]. Grayscale P5 input is promoted to RGB by
//! channel replication.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pixels::RgbImage;

/// Writes a P6 image with the canonical header `P6\n<w> <h>\n255\n`.
pub fn write_ppm<W: Write>(w: &mut W, image: &RgbImage) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", image.width(), image.height())?;
    for p in image.pixels() {
        w.write_all(p)?;
    }
    Ok(())
}

pub fn write_ppm_file(path: &Path, image: &RgbImage) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_ppm(&mut f, image)
}

/// Reads a binary PPM (P6) or PGM (P5); P5 is promoted to RGB.
pub fn read_ppm<R: Read>(r: &mut R) -> Result<RgbImage> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    parse_netpbm(&data)
}

pub fn read_ppm_file(path: &Path) -> Result<RgbImage> {
    let data = std::fs::read(path)?;
    parse_netpbm(&data)
}

fn parse_netpbm(data: &[u8]) -> Result<RgbImage> {
    let mut pos = 0usize;
    let magic = next_token(data, &mut pos).ok_or_else(|| Error::format("missing magic"))?;
    let channels = match magic.as_slice() {
        b"P6" => 3usize,
        b"P5" => 1usize,
        other => {
            return Err(Error::format(format!(
                "unsupported netpbm magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = next_usize(data, &mut pos)?;
    let height = next_usize(data, &mut pos)?;
    let maxval = next_usize(data, &mut pos)?;
    if maxval != 255 {
        return Err(Error::format(format!("unsupported maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format("raster size overflow"))?;
    if data.len() < pos + need {
        return Err(Error::format("truncated raster"));
    }
    let raster = &data[pos..pos + need];
    if channels == 3 {
        let pixels = raster.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        RgbImage::new(width, height, pixels)
    } else {
        RgbImage::from_gray(width, height, raster.to_vec())
    }
}

/// Returns the next whitespace-delimited token, skipping `#` comment lines.
fn next_token(data: &[u8], pos: &mut usize) -> Option<Vec<u8>> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= data.len() {
        return None;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(data[start..*pos].to_vec())
}

fn next_usize(data: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = next_token(data, pos).ok_or_else(|| Error::format("truncated header"))?;
    std::str::from_utf8(&tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format("bad header field"))
}

/// Loads an image by sniffing the format: netpbm (P5/P6) or PNG.
pub fn read_image_file(path: &Path) -> Result<RgbImage> {
    let data = std::fs::read(path)?;
    if data.starts_with(b"P6") || data.starts_with(b"P5") {
        return parse_netpbm(&data);
    }
    let img = image::load_from_memory(&data)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?
        .to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img.pixels().map(|p| [p[0], p[1], p[2]]).collect();
    RgbImage::new(w, h, pixels)
}

/// Reads newline-agnostic text helper used by mask files written as PPM.
pub fn read_ppm_buf<R: BufRead>(r: &mut R) -> Result<RgbImage> {
    read_ppm(r)
}
