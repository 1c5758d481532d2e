//! Full encode path: images -> quantized channels -> scan vectors -> level
//! streams -> Huffman bits -> constraint-coded 196-nt oligos plus manifest.

use std::collections::BTreeMap;

use crate::constrained::Codebook;
use crate::error::{Error, Result};
use crate::fasta::FastaRecord;
use crate::hilbert::{linearize_channel, ScanOrder};
use crate::huffman::HuffmanTable;
use crate::levels::{diff_encode, partition_levels, Symbol};
use crate::manifest::{
    AddressLayout, CodebookGeometry, HuffmanEntry, ImageEntry, Manifest, StreamEntry,
    MANIFEST_VERSION,
};
use crate::oligo::{
    assemble_oligo, OligoId, BLOCK_BITS, MAX_BLOCKS_PER_STREAM, MAX_IMAGES, OLIGO_PAYLOAD_BITS,
    PAYLOAD_LEN,
};
use crate::pixels::{quantize_image, ColorTag, QuantizedChannel, RgbImage, LEVELS};
use crate::primers::{design_primers, PrimerSet};

pub const DEFAULT_RESYNC_RATE: f64 = 0.03;
pub const DEFAULT_PRIMER_SEED: u64 = 0x0d9a_517e;

#[derive(Debug, Clone)]
pub struct EncodeParams {
    pub resync_rate: f64,
    pub primer_seed: u64,
}

impl Default for EncodeParams {
    fn default() -> Self {
        EncodeParams {
            resync_rate: DEFAULT_RESYNC_RATE,
            primer_seed: DEFAULT_PRIMER_SEED,
        }
    }
}

/// One encoded oligo with its identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolRecord {
    pub id: OligoId,
    pub seq: Vec<u8>,
}

impl PoolRecord {
    pub fn to_fasta(&self) -> FastaRecord {
        FastaRecord {
            id: self.id.to_string(),
            seq: self.seq.clone(),
        }
    }
}

/// Size accounting for one encode run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EncodeStats {
    pub oligos: usize,
    pub total_nt: usize,
    pub payload_nt: usize,
    /// 8-bit source size: `8 * 3 * m * n` summed over images.
    pub source_bits: u64,
    /// Quantized source size: `3 * 3 * m * n` summed over images.
    pub quantized_bits: u64,
    /// Exact Huffman output bits over all streams.
    pub huffman_bits: u64,
    /// `quantized_bits / payload_nt`; > 22/13 means compression is winning.
    pub quantized_bits_per_payload_nt: f64,
    /// `source_bits / total_nt`; the headline storage density.
    pub source_bits_per_nt: f64,
}

/// Result of encoding a batch of images into one pool.
#[derive(Debug, Clone)]
pub struct EncodedPool {
    pub records: Vec<PoolRecord>,
    pub manifest: Manifest,
    pub stats: EncodeStats,
}

impl EncodedPool {
    pub fn fasta_records(&self) -> Vec<FastaRecord> {
        self.records.iter().map(PoolRecord::to_fasta).collect()
    }

    pub fn sequences(&self) -> Vec<Vec<u8>> {
        self.records.iter().map(|r| r.seq.clone()).collect()
    }
}

/// The 24 differential symbol streams of one image, keyed by color and level.
pub fn image_streams(image: &RgbImage, resync_rate: f64) -> ([QuantizedChannel; 3], Vec<(ColorTag, u8, Vec<Symbol>, u64)>) {
    let channels = quantize_image(image);
    let order = ScanOrder::new(image.height(), image.width()).expect("validated dimensions");
    let mut streams = Vec::with_capacity(3 * LEVELS);
    for channel in &channels {
        let vector = linearize_channel(&order, channel);
        let lists = partition_levels(&vector);
        for (level, list) in lists.iter().enumerate() {
            let stream = diff_encode(list, resync_rate);
            streams.push((channel.color(), level as u8, stream, list.len() as u64));
        }
    }
    (channels, streams)
}

/// Encodes images into a constraint-compliant oligo pool plus its manifest.
pub fn encode_images(images: &[RgbImage], params: &EncodeParams) -> Result<EncodedPool> {
    if images.is_empty() {
        return Err(Error::invalid("no images to encode"));
    }
    if images.len() > MAX_IMAGES {
        return Err(Error::capacity(format!(
            "at most {MAX_IMAGES} images fit the address space"
        )));
    }
    if params.resync_rate <= 0.0 || params.resync_rate > 1.0 {
        return Err(Error::invalid("resync rate must be in (0, 1]"));
    }

    let book10 = Codebook::new(18, 10)?;
    let book13 = Codebook::new(22, 13)?;
    let primers = design_primers(params.primer_seed)?;

    let mut records = Vec::new();
    let mut image_entries = Vec::new();
    let mut huffman_entries = Vec::new();
    let mut stream_entries = Vec::new();
    let mut source_bits = 0u64;
    let mut quantized_bits = 0u64;
    let mut huffman_bits = 0u64;

    for (index, image) in images.iter().enumerate() {
        let image_idx = index as u8;
        let pixels = (image.width() * image.height()) as u64;
        source_bits += 8 * 3 * pixels;
        quantized_bits += 3 * 3 * pixels;

        let (_, streams) = image_streams(image, params.resync_rate);

        // One shared code table per image over all 24 streams.
        let mut counts: BTreeMap<Symbol, u64> = BTreeMap::new();
        for (_, _, stream, _) in &streams {
            for &s in stream {
                *counts.entry(s).or_insert(0) += 1;
            }
        }
        let table = HuffmanTable::build(&counts)?;
        huffman_entries.push(HuffmanEntry {
            image: image_idx,
            symbols: table.lengths().iter().map(|&(s, _)| s).collect(),
            lengths: table.lengths().iter().map(|&(_, l)| l).collect(),
        });

        for (color, level, stream, index_count) in &streams {
            let mut bits = table.encode_stream(stream)?;
            let exact_bits = bits.len() as u64;
            huffman_bits += exact_bits;
            bits.pad_to_multiple(OLIGO_PAYLOAD_BITS);
            let blocks = bits.len() / OLIGO_PAYLOAD_BITS;
            if blocks > MAX_BLOCKS_PER_STREAM {
                return Err(Error::capacity(format!(
                    "stream img{image_idx}/{color}{level} needs {blocks} blocks; \
                     the address space allows {MAX_BLOCKS_PER_STREAM}"
                )));
            }
            for block in 0..blocks {
                let payload = bits.slice(block * OLIGO_PAYLOAD_BITS, (block + 1) * OLIGO_PAYLOAD_BITS);
                let id = OligoId {
                    image: image_idx,
                    color: *color,
                    level: *level,
                    block: block as u16,
                };
                let seq = assemble_oligo(
                    primers.pair_for_level(*level),
                    id,
                    &payload,
                    &book10,
                    &book13,
                )?;
                records.push(PoolRecord { id, seq });
            }
            stream_entries.push(StreamEntry {
                image: image_idx,
                color: color.letter(),
                level: *level,
                blocks: blocks as u32,
                bits: exact_bits,
                indices: *index_count,
            });
        }

        image_entries.push(ImageEntry {
            index: image_idx,
            width: image.width(),
            height: image.height(),
            source: None,
        });
    }

    let manifest = Manifest {
        version: MANIFEST_VERSION,
        quant_bits: 3,
        resync_rate: params.resync_rate,
        address_layout: AddressLayout::default(),
        color_words: vec!["ATC".into(), "TCG".into(), "GAT".into()],
        codebooks: vec![
            CodebookGeometry {
                payload_bits: 18,
                block_len: 10,
            },
            CodebookGeometry {
                payload_bits: BLOCK_BITS as u32,
                block_len: 13,
            },
        ],
        primers: primers.clone(),
        images: image_entries,
        huffman: huffman_entries,
        streams: stream_entries,
    };

    let oligos = records.len();
    let total_nt = oligos * crate::oligo::OLIGO_LEN;
    let payload_nt = oligos * PAYLOAD_LEN;
    let stats = EncodeStats {
        oligos,
        total_nt,
        payload_nt,
        source_bits,
        quantized_bits,
        huffman_bits,
        quantized_bits_per_payload_nt: quantized_bits as f64 / payload_nt as f64,
        source_bits_per_nt: source_bits as f64 / total_nt as f64,
    };

    Ok(EncodedPool {
        records,
        manifest,
        stats,
    })
}

/// Convenience wrapper used throughout the tests: primer set of an encode.
pub fn pool_primers(manifest: &Manifest) -> &PrimerSet {
    &manifest.primers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constrained::is_valid_word;
    use crate::oligo::{ADDRESS_LEN, COLOR_LEN, OLIGO_LEN, PRIMER_LEN};
    use crate::synth;

    #[test]
    fn oligo_count_matches_stream_accounting() {
        let image = synth::poster(5, 48, 40);
        let pool = encode_images(&[image], &EncodeParams::default()).unwrap();
        let expected: u64 = pool
            .manifest
            .streams
            .iter()
            .map(|s| (s.bits).div_ceil(OLIGO_PAYLOAD_BITS as u64))
            .sum();
        assert_eq!(pool.records.len() as u64, expected);
        assert_eq!(pool.manifest.expected_oligos(), expected);
    }

    #[test]
    fn every_emitted_block_is_constraint_compliant() {
        let image = synth::poster(6, 32, 32);
        let pool = encode_images(&[image], &EncodeParams::default()).unwrap();
        for rec in &pool.records {
            assert_eq!(rec.seq.len(), OLIGO_LEN);
            let addr_block = &rec.seq[PRIMER_LEN + COLOR_LEN..PRIMER_LEN + ADDRESS_LEN];
            assert!(is_valid_word(addr_block));
            let payload = &rec.seq[PRIMER_LEN + ADDRESS_LEN..OLIGO_LEN - PRIMER_LEN];
            for block in payload.chunks_exact(13) {
                assert!(is_valid_word(block));
            }
        }
    }

    #[test]
    fn encode_is_deterministic() {
        let image = synth::poster(7, 21, 17);
        let a = encode_images(std::slice::from_ref(&image), &EncodeParams::default()).unwrap();
        let b = encode_images(&[image], &EncodeParams::default()).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.manifest, b.manifest);
    }

    #[test]
    fn tiny_image_encodes_to_24_single_block_streams() {
        let image = RgbImage::new(1, 1, vec![[200, 100, 30]]).unwrap();
        let pool = encode_images(&[image], &EncodeParams::default()).unwrap();
        assert_eq!(pool.records.len(), 24);
        assert!(pool
            .manifest
            .streams
            .iter()
            .all(|s| s.blocks == 1));
    }

    #[test]
    fn too_many_images_are_rejected() {
        let images: Vec<RgbImage> = (0..17)
            .map(|i| RgbImage::filled(2, 2, [i as u8, 0, 0]).unwrap())
            .collect();
        assert!(matches!(
            encode_images(&images, &EncodeParams::default()),
            Err(Error::Capacity(_))
        ));
    }
}
