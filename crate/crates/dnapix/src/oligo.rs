//! Oligo layout: primers, addresses, payload blocks, assembly and parsing.
//!
//! Every oligo is exactly 196 nt: a 20-nt prefix primer, a 13-nt address
//! (3-nt color word + 10-nt constrained block packing 18 address bits), 11
//! payload blocks of 13 nt (22 bits each, 242 bits total) and a 20-nt suffix
//! primer.

use crate::bits::BitString;
use crate::constrained::{BlockDecode, Codebook};
use crate::error::{Error, Result};
use crate::pixels::ColorTag;
use crate::primers::PrimerPair;

pub const PRIMER_LEN: usize = 20;
pub const COLOR_LEN: usize = 3;
pub const PACKED_LEN: usize = 10;
pub const ADDRESS_LEN: usize = COLOR_LEN + PACKED_LEN;
pub const PAYLOAD_BLOCKS: usize = 11;
pub const BLOCK_LEN: usize = 13;
pub const PAYLOAD_LEN: usize = PAYLOAD_BLOCKS * BLOCK_LEN;
pub const OLIGO_LEN: usize = 2 * PRIMER_LEN + ADDRESS_LEN + PAYLOAD_LEN;

pub const BLOCK_BITS: u8 = 22;
pub const OLIGO_PAYLOAD_BITS: usize = PAYLOAD_BLOCKS * BLOCK_BITS as usize;

/// Address bit budget: image index, intensity level, block index.
pub const IMAGE_BITS: u32 = 4;
pub const LEVEL_BITS: u32 = 3;
pub const BLOCK_IDX_BITS: u32 = 11;
pub const ADDRESS_BITS: u32 = IMAGE_BITS + LEVEL_BITS + BLOCK_IDX_BITS;

pub const MAX_IMAGES: usize = 1 << IMAGE_BITS;
pub const MAX_BLOCKS_PER_STREAM: usize = 1 << BLOCK_IDX_BITS;

/// The redundant 3-nt color words.
pub const COLOR_WORDS: [(ColorTag, [u8; 3]); 3] = [
    (ColorTag::R, *b"ATC"),
    (ColorTag::G, *b"TCG"),
    (ColorTag::B, *b"GAT"),
];

pub fn encode_color(tag: ColorTag) -> [u8; 3] {
    COLOR_WORDS[tag.index()].1
}

/// Hamming distance between equal-length sequences.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Smallest pairwise distance among the three color words (computed, not
/// assumed; it is 3, so any single substitution decodes uniquely).
pub fn color_code_min_distance() -> usize {
    let mut min = COLOR_LEN;
    for (i, (_, a)) in COLOR_WORDS.iter().enumerate() {
        for (_, b) in COLOR_WORDS.iter().skip(i + 1) {
            min = min.min(hamming(a, b));
        }
    }
    min
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorDecode {
    pub tag: ColorTag,
    pub corrected: bool,
}

/// Decodes a 3-nt color word to the unique nearest codeword.
pub fn decode_color(word: &[u8]) -> Result<ColorDecode> {
    if word.len() != COLOR_LEN {
        return Err(Error::invalid("color word must be 3 nt"));
    }
    let mut best: Option<(usize, ColorTag)> = None;
    let mut tied = false;
    for &(tag, codeword) in &COLOR_WORDS {
        let d = hamming(word, &codeword);
        match best {
            None => best = Some((d, tag)),
            Some((bd, _)) if d < bd => {
                best = Some((d, tag));
                tied = false;
            }
            Some((bd, _)) if d == bd => tied = true,
            _ => {}
        }
    }
    let (d, tag) = best.expect("three codewords checked");
    if tied {
        return Err(Error::AmbiguousColor(
            String::from_utf8_lossy(word).into_owned(),
        ));
    }
    Ok(ColorDecode {
        tag,
        corrected: d > 0,
    })
}

/// Packs (image, level, block) into the 18 address bits, layout 4+3+11.
pub fn pack_address(image: u8, level: u8, block: u16) -> Result<u32> {
    if image as usize >= MAX_IMAGES {
        return Err(Error::invalid(format!("image index {image} needs more than 4 bits")));
    }
    if level as u32 >= 1 << LEVEL_BITS {
        return Err(Error::invalid(format!("level {level} needs more than 3 bits")));
    }
    if block as usize >= MAX_BLOCKS_PER_STREAM {
        return Err(Error::invalid(format!("block index {block} needs more than 11 bits")));
    }
    Ok((image as u32) << (LEVEL_BITS + BLOCK_IDX_BITS) | (level as u32) << BLOCK_IDX_BITS | block as u32)
}

/// Inverse of [`pack_address`].
pub fn unpack_address(packed: u32) -> (u8, u8, u16) {
    debug_assert!(packed < 1 << ADDRESS_BITS);
    let image = (packed >> (LEVEL_BITS + BLOCK_IDX_BITS)) as u8;
    let level = (packed >> BLOCK_IDX_BITS & ((1 << LEVEL_BITS) - 1)) as u8;
    let block = (packed & ((1 << BLOCK_IDX_BITS) - 1)) as u16;
    (image, level, block)
}

/// Identity of one oligo within a pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OligoId {
    pub image: u8,
    pub color: ColorTag,
    pub level: u8,
    pub block: u16,
}

impl OligoId {
    /// The canonical 13-nt address for this identity.
    pub fn address(&self, book10: &Codebook) -> Result<Vec<u8>> {
        let packed = pack_address(self.image, self.level, self.block)?;
        let mut addr = Vec::with_capacity(ADDRESS_LEN);
        addr.extend_from_slice(&encode_color(self.color));
        addr.extend_from_slice(&book10.encode_block(packed as u64)?);
        Ok(addr)
    }
}

impl std::fmt::Display for OligoId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "img{}_{}{}_blk{}",
            self.image,
            self.color.letter(),
            self.level,
            self.block
        )
    }
}

impl std::str::FromStr for OligoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<OligoId> {
        let bad = || Error::format(format!("bad oligo id {s:?}"));
        let rest = s.strip_prefix("img").ok_or_else(bad)?;
        let (image, rest) = rest.split_once('_').ok_or_else(bad)?;
        let (colorlevel, block) = rest.split_once("_blk").ok_or_else(bad)?;
        let mut chars = colorlevel.chars();
        let color = chars.next().and_then(ColorTag::from_letter).ok_or_else(bad)?;
        let level: u8 = chars.as_str().parse().map_err(|_| bad())?;
        Ok(OligoId {
            image: image.parse().map_err(|_| bad())?,
            color,
            level,
            block: block.parse().map_err(|_| bad())?,
        })
    }
}

/// Builds a full 196-nt oligo; the payload must be exactly 242 bits.
pub fn assemble_oligo(
    primer: &PrimerPair,
    id: OligoId,
    payload: &BitString,
    book10: &Codebook,
    book13: &Codebook,
) -> Result<Vec<u8>> {
    if payload.len() != OLIGO_PAYLOAD_BITS {
        return Err(Error::invalid(format!(
            "payload must be {OLIGO_PAYLOAD_BITS} bits, got {}",
            payload.len()
        )));
    }
    let mut seq = Vec::with_capacity(OLIGO_LEN);
    seq.extend_from_slice(primer.forward());
    seq.extend_from_slice(&id.address(book10)?);
    let mut reader = payload.reader();
    for _ in 0..PAYLOAD_BLOCKS {
        let bits = reader.read_bits(BLOCK_BITS).expect("length checked");
        seq.extend_from_slice(&book13.encode_block(bits)?);
    }
    seq.extend_from_slice(primer.reverse());
    debug_assert_eq!(seq.len(), OLIGO_LEN);
    Ok(seq)
}

/// Positionally parsed oligo with per-field decode outcomes.
#[derive(Debug, Clone)]
pub struct ParsedOligo {
    pub prefix_primer: Vec<u8>,
    pub suffix_primer: Vec<u8>,
    /// Raw 13-nt address field as received.
    pub address: Vec<u8>,
    /// Color decode of the first 3 address nt; `None` when ambiguous.
    pub color: Option<ColorDecode>,
    /// Decode of the 10-nt packed address block.
    pub packed: BlockDecode,
    /// The 242 recovered payload bits.
    pub payload: BitString,
    /// How many of the 11 payload blocks needed nearest-codeword fallback.
    pub corrected_payload_blocks: usize,
}

impl ParsedOligo {
    pub fn packed_fields(&self) -> (u8, u8, u16) {
        unpack_address(self.packed.bits as u32)
    }
}

/// Splits a 196-nt sequence into its fields and decodes each block, falling
/// back to nearest codewords where needed.
pub fn parse_oligo(seq: &[u8], book10: &Codebook, book13: &Codebook) -> Result<ParsedOligo> {
    if seq.len() != OLIGO_LEN {
        return Err(Error::invalid(format!(
            "oligo must be {OLIGO_LEN} nt, got {}",
            seq.len()
        )));
    }
    let prefix_primer = seq[..PRIMER_LEN].to_vec();
    let address = seq[PRIMER_LEN..PRIMER_LEN + ADDRESS_LEN].to_vec();
    let payload_nt = &seq[PRIMER_LEN + ADDRESS_LEN..PRIMER_LEN + ADDRESS_LEN + PAYLOAD_LEN];
    let suffix_primer = seq[OLIGO_LEN - PRIMER_LEN..].to_vec();

    let color = decode_color(&address[..COLOR_LEN]).ok();
    let packed = book10.decode_block(&address[COLOR_LEN..])?;

    let mut payload = BitString::with_capacity(OLIGO_PAYLOAD_BITS);
    let mut corrected_payload_blocks = 0;
    for block in payload_nt.chunks_exact(BLOCK_LEN) {
        let decoded = book13.decode_block(block)?;
        if decoded.corrected {
            corrected_payload_blocks += 1;
        }
        payload.push_bits(decoded.bits, BLOCK_BITS);
    }

    Ok(ParsedOligo {
        prefix_primer,
        suffix_primer,
        address,
        color,
        packed,
        payload,
        corrected_payload_blocks,
    })
}
