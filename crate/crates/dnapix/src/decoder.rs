//! Pool decoding: address correction, stream recovery with gap-tolerant
//! Huffman realignment, and image reconstruction with unknown-pixel masks.
//!
//! The decoder never needs the original data: oligo identities come from the
//! 13-nt addresses (corrected against the manifest's expected set), payload
//! blocks self-correct to the nearest codeword, and a missing 242-bit block
//! only desynchronizes its own (color, level) stream until the next resync
//! marker that survives an offset scan.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::constrained::Codebook;
use crate::error::{Error, Result};
use crate::hilbert::{delinearize_channel, ScanOrder};
use crate::huffman::HuffmanTable;
use crate::levels::{merge_levels, Symbol, RESYNC, TERMINATOR};
use crate::manifest::Manifest;
use crate::oligo::{parse_oligo, OligoId, OLIGO_LEN, OLIGO_PAYLOAD_BITS};
use crate::pixels::{ColorTag, PixelMask, QuantizedChannel, LEVELS};

/// Offset-scan budget: symbols decoded speculatively per offset before the
/// scan gives up on that alignment.
pub const DEFAULT_PROBE_BUDGET: usize = 4096;

#[derive(Debug, Clone)]
pub struct DecodeParams {
    pub probe_budget: usize,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams {
            probe_budget: DEFAULT_PROBE_BUDGET,
        }
    }
}

/// Outcome of matching a received address against the expected set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    Exact(OligoId),
    Corrected(OligoId),
    /// Two or more expected addresses are equidistant; the oligo is dropped.
    Ambiguous,
}

/// The manifest's expected addresses, indexed for exact and nearest lookup.
pub struct AddressIndex {
    exact: HashMap<Vec<u8>, OligoId>,
    entries: Vec<(Vec<u8>, OligoId)>,
}

impl AddressIndex {
    pub fn from_manifest(manifest: &Manifest, book10: &Codebook) -> Result<AddressIndex> {
        let ids = manifest.expected_ids();
        let mut exact = HashMap::with_capacity(ids.len());
        let mut entries = Vec::with_capacity(ids.len());
        for id in ids {
            let addr = id.address(book10)?;
            exact.insert(addr.clone(), id);
            entries.push((addr, id));
        }
        Ok(AddressIndex { exact, entries })
    }

    /// Replaces an erroneous identifier by the unique expected address at
    /// smallest Hamming distance; ties discard the oligo.
    pub fn correct(&self, address: &[u8]) -> Correction {
        if let Some(&id) = self.exact.get(address) {
            return Correction::Exact(id);
        }
        let mut best_distance = usize::MAX;
        let mut best_id = None;
        let mut tied = false;
        for (addr, id) in &self.entries {
            let d = crate::oligo::hamming(addr, address);
            if d < best_distance {
                best_distance = d;
                best_id = Some(*id);
                tied = false;
            } else if d == best_distance {
                tied = true;
            }
        }
        match (best_id, tied) {
            (Some(id), false) => Correction::Corrected(id),
            _ => Correction::Ambiguous,
        }
    }
}

/// Per-stream recovery outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveredStream {
    pub image: u8,
    pub color: char,
    pub level: u8,
    pub blocks_expected: u32,
    pub blocks_present: u32,
    pub gaps: u32,
    pub realign_successes: u32,
    pub realign_failures: u32,
    pub dropped_symbols: u64,
    pub truncated_runs: u32,
    pub pruned_indices: u64,
    pub terminated: bool,
    /// Recovered pixel indices, strictly increasing.
    #[serde(skip)]
    pub indices: Vec<u32>,
}

/// Aggregate decode counters for the report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DecodeCounts {
    pub oligos_in: u64,
    pub bad_length: u64,
    pub ambiguous_address_discarded: u64,
    pub address_corrected: u64,
    pub payload_blocks_corrected: u64,
    pub color_corrected: u64,
    pub color_ambiguous: u64,
    pub primer_mismatches: u64,
    pub duplicates_dropped: u64,
    /// Distinct oligo identities recovered after deduplication.
    pub unique_oligos_recovered: u64,
    /// Recovered oligos whose kept copy needed any correction.
    pub oligos_with_corrections: u64,
    pub total_gaps: u64,
    pub realign_successes: u64,
    pub realign_failures: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodeReport {
    pub counts: DecodeCounts,
    pub streams: Vec<RecoveredStream>,
}

impl DecodeReport {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("report serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<DecodeReport> {
        let data = std::fs::read_to_string(path)?;
        serde_json::from_str(&data).map_err(|e| Error::format(format!("report parse: {e}")))
    }
}

/// One reconstructed image with its per-channel unknown masks.
#[derive(Debug, Clone)]
pub struct DecodedImage {
    pub index: u8,
    pub channels: [QuantizedChannel; 3],
    pub masks: [PixelMask; 3],
}

#[derive(Debug)]
pub struct DecodeOutput {
    pub images: Vec<DecodedImage>,
    pub report: DecodeReport,
}

/// Decodes a pool of (possibly damaged) 196-nt sequences back to quantized
/// channels plus unknown-pixel masks.
pub fn decode_pool(
    sequences: &[Vec<u8>],
    manifest: &Manifest,
    params: &DecodeParams,
) -> Result<DecodeOutput> {
    let book10 = Codebook::new(18, 10)?;
    let book13 = Codebook::new(22, 13)?;
    let address_index = AddressIndex::from_manifest(manifest, &book10)?;

    let mut counts = DecodeCounts {
        oligos_in: sequences.len() as u64,
        ..Default::default()
    };

    // Route every oligo's payload to its stream slot, deduplicating on the
    // copy with fewer corrected fields (first seen wins ties).
    let mut recovered: HashMap<OligoId, (BitString, usize)> = HashMap::new();
    for seq in sequences {
        if seq.len() != OLIGO_LEN {
            counts.bad_length += 1;
            continue;
        }
        let parsed = parse_oligo(seq, &book10, &book13)?;
        let (id, address_was_corrected) = match address_index.correct(&parsed.address) {
            Correction::Exact(id) => (id, false),
            Correction::Corrected(id) => {
                counts.address_corrected += 1;
                (id, true)
            }
            Correction::Ambiguous => {
                counts.ambiguous_address_discarded += 1;
                continue;
            }
        };
        match parsed.color {
            Some(c) if c.corrected => counts.color_corrected += 1,
            None => counts.color_ambiguous += 1,
            _ => {}
        }
        let expected_pair = manifest.primers.pair_for_level(id.level);
        if parsed.prefix_primer != expected_pair.forward()
            || parsed.suffix_primer != expected_pair.reverse()
        {
            counts.primer_mismatches += 1;
        }
        counts.payload_blocks_corrected += parsed.corrected_payload_blocks as u64;
        let badness = parsed.corrected_payload_blocks + address_was_corrected as usize;
        match recovered.entry(id) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert((parsed.payload, badness));
            }
            std::collections::hash_map::Entry::Occupied(mut o) => {
                counts.duplicates_dropped += 1;
                if badness < o.get().1 {
                    o.insert((parsed.payload, badness));
                }
            }
        }
    }
    counts.unique_oligos_recovered = recovered.len() as u64;
    counts.oligos_with_corrections = recovered.values().filter(|(_, b)| *b > 0).count() as u64;

    // Decode each stream independently.
    let mut stream_results = Vec::with_capacity(manifest.streams.len());
    for entry in &manifest.streams {
        let color = ColorTag::from_letter(entry.color)
            .ok_or_else(|| Error::format(format!("bad color tag {:?}", entry.color)))?;
        let image_info = manifest.image(entry.image)?;
        let grid_len = (image_info.width * image_info.height) as u32;
        let table = manifest.huffman_table(entry.image)?;

        let blocks: Vec<Option<&BitString>> = (0..entry.blocks)
            .map(|b| {
                recovered
                    .get(&OligoId {
                        image: entry.image,
                        color,
                        level: entry.level,
                        block: b as u16,
                    })
                    .map(|(bits, _)| bits)
            })
            .collect();
        let present = blocks.iter().filter(|b| b.is_some()).count() as u32;
        let gaps = entry.blocks - present;
        counts.total_gaps += gaps as u64;

        let decoded = decode_stream_with_realignment(
            &blocks,
            &table,
            grid_len,
            crate::levels::resync_period(manifest.resync_rate),
            params,
        );
        counts.realign_successes += decoded.realign_successes as u64;
        counts.realign_failures += decoded.realign_failures as u64;

        stream_results.push(RecoveredStream {
            image: entry.image,
            color: entry.color,
            level: entry.level,
            blocks_expected: entry.blocks,
            blocks_present: present,
            gaps,
            realign_successes: decoded.realign_successes,
            realign_failures: decoded.realign_failures,
            dropped_symbols: decoded.dropped_symbols,
            truncated_runs: decoded.truncated_runs,
            pruned_indices: decoded.pruned_indices,
            terminated: decoded.terminated,
            indices: decoded.indices,
        });
    }

    // Join the 24 streams of each image.
    let mut images = Vec::with_capacity(manifest.images.len());
    for info in &manifest.images {
        let order = ScanOrder::new(info.height, info.width)?;
        let grid_len = info.width * info.height;
        let mut channels = Vec::with_capacity(3);
        let mut masks = Vec::with_capacity(3);
        for color in ColorTag::ALL {
            let mut lists: [Vec<u32>; LEVELS] = Default::default();
            for s in &stream_results {
                if s.image == info.index && s.color == color.letter() {
                    lists[s.level as usize] = s.indices.clone();
                }
            }
            let merged = merge_levels(&lists, grid_len);
            channels.push(delinearize_channel(&order, &merged.values, color)?);
            let mask_grid = order.delinearize(&merged.unknown)?;
            masks.push(PixelMask::new(info.width, info.height, mask_grid)?);
        }
        let channels: [QuantizedChannel; 3] = channels.try_into().expect("three colors");
        let masks: [PixelMask; 3] = masks.try_into().expect("three colors");
        images.push(DecodedImage {
            index: info.index,
            channels,
            masks,
        });
    }

    Ok(DecodeOutput {
        images,
        report: DecodeReport {
            counts,
            streams: stream_results,
        },
    })
}

/// Result of decoding one stream's block sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamDecode {
    pub indices: Vec<u32>,
    pub realign_successes: u32,
    pub realign_failures: u32,
    pub dropped_symbols: u64,
    pub truncated_runs: u32,
    /// Emitted indices retracted because a later resync marker proved them
    /// junk (its absolute value sat below them).
    pub pruned_indices: u64,
    pub terminated: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RunState {
    Seeking,
    Absolute,
    Run,
}

struct StreamDecoder<'a> {
    table: &'a HuffmanTable,
    grid_len: u32,
    /// Marker absolutes may retract at most this many emitted indices;
    /// beyond it the marker itself is deemed junk.
    prune_cap: usize,
    last: Option<u32>,
    state: RunState,
    seek_noted: bool,
    out: StreamDecode,
}

impl<'a> StreamDecoder<'a> {
    fn new(table: &'a HuffmanTable, grid_len: u32, prune_cap: usize) -> Self {
        StreamDecoder {
            table,
            grid_len,
            prune_cap,
            last: None,
            state: RunState::Seeking,
            seek_noted: false,
            out: StreamDecode {
                indices: Vec::new(),
                realign_successes: 0,
                realign_failures: 0,
                dropped_symbols: 0,
                truncated_runs: 0,
                pruned_indices: 0,
                terminated: false,
            },
        }
    }

    /// How many emitted indices a marker absolute of `abs` would retract.
    fn prune_count(&self, abs: u32) -> usize {
        let cut = self.out.indices.partition_point(|&v| v < abs);
        self.out.indices.len() - cut
    }

    /// Accepts a marker absolute that contradicts emitted indices: junk
    /// data can only ever run ahead of the true position, so everything at
    /// or above the marker's absolute is retracted.
    fn prune_to(&mut self, abs: u32) {
        let cut = self.out.indices.partition_point(|&v| v < abs);
        self.out.pruned_indices += (self.out.indices.len() - cut) as u64;
        self.out.indices.truncate(cut);
        self.last = self.out.indices.last().copied();
    }

    fn note_corrupt(&mut self) {
        if !self.seek_noted {
            self.out.truncated_runs += 1;
            self.seek_noted = true;
        }
        self.out.dropped_symbols += 1;
        self.state = RunState::Seeking;
    }

    /// Feeds one decoded data/marker symbol (terminators are handled by the
    /// segment loop, which knows the bit position).
    fn feed(&mut self, sym: Symbol) {
        if sym == RESYNC {
            self.state = RunState::Absolute;
            self.seek_noted = false;
            return;
        }
        match self.state {
            RunState::Seeking => {
                if !self.seek_noted {
                    self.out.truncated_runs += 1;
                    self.seek_noted = true;
                }
                self.out.dropped_symbols += 1;
            }
            RunState::Absolute => {
                let in_bounds = sym >= 0 && (sym as u64) < self.grid_len as u64;
                if in_bounds && self.last.is_none_or(|l| sym > l as Symbol) {
                    self.push(sym as u32);
                } else if in_bounds && self.prune_count(sym as u32) <= self.prune_cap {
                    self.prune_to(sym as u32);
                    self.push(sym as u32);
                } else {
                    self.note_corrupt();
                }
            }
            RunState::Run => {
                let next = self.last.map(|l| l as Symbol + sym);
                match next {
                    Some(n) if sym > 0 && (n as u64) < self.grid_len as u64 => {
                        self.push(n as u32);
                    }
                    _ => self.note_corrupt(),
                }
            }
        }
    }

    fn push(&mut self, idx: u32) {
        self.out.indices.push(idx);
        self.last = Some(idx);
        self.state = RunState::Run;
        self.seek_noted = false;
    }

    /// Decodes a segment from a bit offset until its bits run out or the
    /// terminator appears. Trailing bits that cannot complete a codeword are
    /// discarded (the following gap destroyed their continuation).
    ///
    /// A real terminator can only end inside the stream's final block; a
    /// `-2` decoded earlier comes from a corrupted block and is treated as
    /// damage so the rest of the stream still decodes.
    fn run_segment(&mut self, bits: &BitString, start: usize, segment_abs_start: usize, final_block_start: usize) {
        let mut reader = bits.reader_at(start);
        while let Some(sym) = self.table.decode_symbol(&mut reader) {
            if sym == TERMINATOR {
                if segment_abs_start + reader.pos() > final_block_start {
                    self.out.terminated = true;
                    return;
                }
                self.note_corrupt();
                continue;
            }
            self.feed(sym);
        }
    }

    /// Offset scan after a gap: tries every bit offset into the segment,
    /// speculatively decoding until a resync marker followed by a plausible
    /// absolute index turns up within the probe budget.
    fn realign(&self, bits: &BitString, probe_budget: usize) -> Option<usize> {
        let max_offset = OLIGO_PAYLOAD_BITS.min(bits.len());
        for offset in 0..max_offset {
            let mut reader = bits.reader_at(offset);
            let mut decoded = 0usize;
            loop {
                let marker_pos = reader.pos();
                let Some(sym) = self.table.decode_symbol(&mut reader) else {
                    break;
                };
                decoded += 1;
                if decoded > probe_budget {
                    break;
                }
                if sym != RESYNC {
                    continue;
                }
                let Some(abs) = self.table.decode_symbol(&mut reader) else {
                    break;
                };
                decoded += 1;
                let in_bounds = abs >= 0 && (abs as u64) < self.grid_len as u64;
                let plausible = in_bounds
                    && (self.last.is_none_or(|l| abs > l as Symbol)
                        || self.prune_count(abs as u32) <= self.prune_cap);
                if plausible {
                    return Some(marker_pos);
                }
                // Not plausible at this offset position; keep scanning from
                // right after the marker pair.
            }
        }
        None
    }
}

/// Decodes a stream given its (possibly gapped) 242-bit blocks.
/// `resync_period` is the encoder's marker spacing; it bounds how many
/// emitted indices a contradicting marker may retract.
pub fn decode_stream_with_realignment(
    blocks: &[Option<&BitString>],
    table: &HuffmanTable,
    grid_len: u32,
    resync_period: usize,
    params: &DecodeParams,
) -> StreamDecode {
    // Group contiguous present blocks into segments.
    let mut segments: Vec<(usize, BitString)> = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        if let Some(bits) = block {
            debug_assert_eq!(bits.len(), OLIGO_PAYLOAD_BITS);
            match segments.last_mut() {
                Some((start, seg)) if *start + seg.len() / OLIGO_PAYLOAD_BITS == i => {
                    seg.extend(bits);
                }
                _ => segments.push((i, (*bits).clone())),
            }
        }
    }

    let final_block_start = (blocks.len().max(1) - 1) * OLIGO_PAYLOAD_BITS;
    let mut dec = StreamDecoder::new(table, grid_len, 8 * resync_period);
    for (start_block, seg) in &segments {
        if dec.out.terminated {
            break;
        }
        let segment_abs_start = start_block * OLIGO_PAYLOAD_BITS;
        if *start_block == 0 {
            // Stream head is intact; decoding starts bit-aligned.
            dec.state = RunState::Seeking;
            dec.run_segment(seg, 0, segment_abs_start, final_block_start);
        } else {
            match dec.realign(seg, params.probe_budget) {
                Some(marker_pos) => {
                    dec.out.realign_successes += 1;
                    dec.state = RunState::Seeking;
                    dec.run_segment(seg, marker_pos, segment_abs_start, final_block_start);
                }
                None => {
                    dec.out.realign_failures += 1;
                }
            }
        }
    }
    dec.out
}
