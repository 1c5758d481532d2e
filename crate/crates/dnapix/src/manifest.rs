//! The pool manifest: the sidecar the decoder needs to invert an encode.
//!
//! Stored as versioned JSON next to the pool FASTA. It records image
//! dimensions, the per-image canonical Huffman tables, the address bit
//! layout, the primer set, resync rate, quantization parameters and the
//! per-stream block counts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::huffman::HuffmanTable;
use crate::levels::Symbol;
use crate::oligo::{self, OligoId};
use crate::pixels::ColorTag;
use crate::primers::PrimerSet;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddressLayout {
    pub image_bits: u32,
    pub level_bits: u32,
    pub block_bits: u32,
}

impl Default for AddressLayout {
    fn default() -> Self {
        AddressLayout {
            image_bits: oligo::IMAGE_BITS,
            level_bits: oligo::LEVEL_BITS,
            block_bits: oligo::BLOCK_IDX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookGeometry {
    pub payload_bits: u32,
    pub block_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub index: u8,
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Canonical Huffman table of one image: sorted symbols + code lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuffmanEntry {
    pub image: u8,
    pub symbols: Vec<Symbol>,
    pub lengths: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamEntry {
    pub image: u8,
    pub color: char,
    pub level: u8,
    /// Number of 242-bit payload blocks (and thus oligos) in this stream.
    pub blocks: u32,
    /// Exact Huffman bit length before block padding.
    pub bits: u64,
    /// Number of pixel indices carried by this stream.
    pub indices: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub quant_bits: u8,
    pub resync_rate: f64,
    pub address_layout: AddressLayout,
    pub color_words: Vec<String>,
    pub codebooks: Vec<CodebookGeometry>,
    pub primers: PrimerSet,
    pub images: Vec<ImageEntry>,
    pub huffman: Vec<HuffmanEntry>,
    pub streams: Vec<StreamEntry>,
}

impl Manifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("manifest serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let data = std::fs::read_to_string(path)?;
        let manifest: Manifest = serde_json::from_str(&data)
            .map_err(|e| Error::format(format!("manifest parse: {e}")))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(Error::format(format!(
                "unsupported manifest version {}",
                manifest.version
            )));
        }
        Ok(manifest)
    }

    pub fn image(&self, index: u8) -> Result<&ImageEntry> {
        self.images
            .iter()
            .find(|e| e.index == index)
            .ok_or_else(|| Error::format(format!("image {index} not in manifest")))
    }

    /// Rebuilds the canonical Huffman table for one image.
    pub fn huffman_table(&self, image: u8) -> Result<HuffmanTable> {
        let entry = self
            .huffman
            .iter()
            .find(|e| e.image == image)
            .ok_or_else(|| Error::format(format!("no code table for image {image}")))?;
        if entry.symbols.len() != entry.lengths.len() {
            return Err(Error::format("code table symbol/length count mismatch"));
        }
        HuffmanTable::from_lengths(
            entry
                .symbols
                .iter()
                .copied()
                .zip(entry.lengths.iter().copied())
                .collect(),
        )
    }

    pub fn stream(&self, image: u8, color: ColorTag, level: u8) -> Result<&StreamEntry> {
        self.streams
            .iter()
            .find(|s| s.image == image && s.color == color.letter() && s.level == level)
            .ok_or_else(|| {
                Error::format(format!("stream img{image}/{color}{level} not in manifest"))
            })
    }

    /// Total number of oligos the pool should contain.
    pub fn expected_oligos(&self) -> u64 {
        self.streams.iter().map(|s| s.blocks as u64).sum()
    }

    /// Every oligo identity the encoder emitted, in pool order.
    pub fn expected_ids(&self) -> Vec<OligoId> {
        let mut ids = Vec::with_capacity(self.expected_oligos() as usize);
        for s in &self.streams {
            let color = ColorTag::from_letter(s.color).expect("manifest colors validated");
            for block in 0..s.blocks {
                ids.push(OligoId {
                    image: s.image,
                    color,
                    level: s.level,
                    block: block as u16,
                });
            }
        }
        ids
    }

    /// Pooled symbol counts are not stored; this recovers the alphabet only.
    pub fn alphabet(&self, image: u8) -> Result<BTreeMap<Symbol, u8>> {
        let entry = self
            .huffman
            .iter()
            .find(|e| e.image == image)
            .ok_or_else(|| Error::format(format!("no code table for image {image}")))?;
        Ok(entry
            .symbols
            .iter()
            .copied()
            .zip(entry.lengths.iter().copied())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primers::design_primers;

    fn sample() -> Manifest {
        Manifest {
            version: MANIFEST_VERSION,
            quant_bits: 3,
            resync_rate: 0.03,
            address_layout: AddressLayout::default(),
            color_words: vec!["ATC".into(), "TCG".into(), "GAT".into()],
            codebooks: vec![
                CodebookGeometry {
                    payload_bits: 18,
                    block_len: 10,
                },
                CodebookGeometry {
                    payload_bits: 22,
                    block_len: 13,
                },
            ],
            primers: design_primers(1).unwrap(),
            images: vec![ImageEntry {
                index: 0,
                width: 4,
                height: 2,
                source: None,
            }],
            huffman: vec![HuffmanEntry {
                image: 0,
                symbols: vec![-2, -1, 0, 1],
                lengths: vec![2, 2, 2, 2],
            }],
            streams: vec![StreamEntry {
                image: 0,
                color: 'R',
                level: 0,
                blocks: 1,
                bits: 10,
                indices: 4,
            }],
        }
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let m = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        m.save(&path).unwrap();
        let back = Manifest::load(&path).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn huffman_table_rebuilds_from_entry() {
        let m = sample();
        let table = m.huffman_table(0).unwrap();
        assert_eq!(table.alphabet_len(), 4);
        assert_eq!(table.code_len(-2), Some(2));
    }

    #[test]
    fn expected_ids_enumerate_stream_blocks() {
        let m = sample();
        let ids = m.expected_ids();
        assert_eq!(ids.len(), 1);
        assert_eq!(ids[0].to_string(), "img0_R0_blk0");
    }
}
