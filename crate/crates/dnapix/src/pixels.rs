//! Image containers, channel separation and 3-bit quantization.
//!
//! Every pixel of each RGB channel is mapped from 0..=255 to one of 8
//! intensity levels with `floor(v * 8 / 256)`; display-side reconstruction
//! uses the bin midpoint `32 * level + 16`.

use crate::error::{Error, Result};

/// Number of quantized intensity levels per channel.
pub const LEVELS: usize = 8;

/// One of the three color planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColorTag {
    R,
    G,
    B,
}

impl ColorTag {
    pub const ALL: [ColorTag; 3] = [ColorTag::R, ColorTag::G, ColorTag::B];

    pub fn index(self) -> usize {
        match self {
            ColorTag::R => 0,
            ColorTag::G => 1,
            ColorTag::B => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            ColorTag::R => 'R',
            ColorTag::G => 'G',
            ColorTag::B => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<ColorTag> {
        match c {
            'R' => Some(ColorTag::R),
            'G' => Some(ColorTag::G),
            'B' => Some(ColorTag::B),
            _ => None,
        }
    }
}

impl std::fmt::Display for ColorTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// An 8-bit RGB raster in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be at least 1x1"));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel count {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Promotes a grayscale raster to RGB by channel replication.
    pub fn from_gray(width: usize, height: usize, gray: Vec<u8>) -> Result<Self> {
        let pixels = gray.into_iter().map(|v| [v, v, v]).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, rgb: [u8; 3]) {
        self.pixels[row * self.width + col] = rgb;
    }
}

/// A single 8-bit channel plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelMatrix {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl ChannelMatrix {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("channel dimensions must be at least 1x1"));
        }
        if values.len() != width * height {
            return Err(Error::invalid("channel value count mismatch"));
        }
        Ok(ChannelMatrix {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.width + col]
    }
}

/// A channel quantized to 3-bit intensity levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedChannel {
    width: usize,
    height: usize,
    color: ColorTag,
    levels: Vec<u8>,
}

impl QuantizedChannel {
    pub fn new(width: usize, height: usize, color: ColorTag, levels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("channel dimensions must be at least 1x1"));
        }
        if levels.len() != width * height {
            return Err(Error::invalid("level count mismatch"));
        }
        if let Some(v) = levels.iter().find(|&&v| v as usize >= LEVELS) {
            return Err(Error::invalid(format!("level {v} out of range 0..8")));
        }
        Ok(QuantizedChannel {
            width,
            height,
            color,
            levels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn color(&self) -> ColorTag {
        self.color
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.levels[row * self.width + col]
    }
}

/// `floor(v * 8 / 256)`, i.e. the top three bits.
#[inline]
pub fn quantize_level(v: u8) -> u8 {
    v >> 5
}

/// Bin midpoint `32 * level + 16`.
#[inline]
pub fn dequantize_level(level: u8) -> u8 {
    debug_assert!((level as usize) < LEVELS);
    32 * level + 16
}

/// Splits an image into its three channel planes.
pub fn split_channels(image: &RgbImage) -> [ChannelMatrix; 3] {
    let extract = |i: usize| {
        ChannelMatrix::new(
            image.width(),
            image.height(),
            image.pixels().iter().map(|p| p[i]).collect(),
        )
        .expect("image dimensions already validated")
    };
    [extract(0), extract(1), extract(2)]
}

/// Positional inverse of [`split_channels`].
pub fn recombine_channels(channels: &[ChannelMatrix; 3]) -> Result<RgbImage> {
    let (w, h) = (channels[0].width(), channels[0].height());
    for c in channels.iter() {
        if c.width() != w || c.height() != h {
            return Err(Error::invalid("channel dimensions differ"));
        }
    }
    let pixels = (0..w * h)
        .map(|i| {
            [
                channels[0].values()[i],
                channels[1].values()[i],
                channels[2].values()[i],
            ]
        })
        .collect();
    RgbImage::new(w, h, pixels)
}

pub fn quantize_channel(channel: &ChannelMatrix, color: ColorTag) -> QuantizedChannel {
    QuantizedChannel::new(
        channel.width(),
        channel.height(),
        color,
        channel.values().iter().map(|&v| quantize_level(v)).collect(),
    )
    .expect("quantized values are always in range")
}

pub fn dequantize_channel(q: &QuantizedChannel) -> ChannelMatrix {
    ChannelMatrix::new(
        q.width(),
        q.height(),
        q.levels().iter().map(|&v| dequantize_level(v)).collect(),
    )
    .expect("channel dimensions already validated")
}

/// Quantizes all three channels of an image.
pub fn quantize_image(image: &RgbImage) -> [QuantizedChannel; 3] {
    let [r, g, b] = split_channels(image);
    [
        quantize_channel(&r, ColorTag::R),
        quantize_channel(&g, ColorTag::G),
        quantize_channel(&b, ColorTag::B),
    ]
}

/// Rebuilds a displayable image from quantized channels via bin midpoints.
pub fn dequantize_image(channels: &[QuantizedChannel; 3]) -> Result<RgbImage> {
    recombine_channels(&[
        dequantize_channel(&channels[0]),
        dequantize_channel(&channels[1]),
        dequantize_channel(&channels[2]),
    ])
}

/// Boolean per-pixel mask; `true` marks a suspect or missing pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl PixelMask {
    pub fn empty(width: usize, height: usize) -> Self {
        PixelMask {
            width,
            height,
            flags: vec![false; width * height],
        }
    }

    pub fn new(width: usize, height: usize, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != width * height {
            return Err(Error::invalid("mask size mismatch"));
        }
        Ok(PixelMask {
            width,
            height,
            flags,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.flags[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.flags[row * self.width + col] = v;
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn any(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    /// Per-pixel union with another mask of the same shape.
    pub fn union(&self, other: &PixelMask) -> Result<PixelMask> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::invalid("mask dimensions differ"));
        }
        Ok(PixelMask {
            width: self.width,
            height: self.height,
            flags: self
                .flags
                .iter()
                .zip(&other.flags)
                .map(|(&a, &b)| a || b)
                .collect(),
        })
    }

    /// Morphological dilation with a 3x3 structuring element.
    pub fn dilate(&self) -> PixelMask {
        let mut out = PixelMask::empty(self.width, self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                if !self.get(r, c) {
                    continue;
                }
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        if nr >= 0 && nr < self.height as i64 && nc >= 0 && nc < self.width as i64 {
                            out.set(nr as usize, nc as usize, true);
                        }
                    }
                }
            }
        }
        out
    }
}
