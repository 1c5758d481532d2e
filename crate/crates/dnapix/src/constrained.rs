//! Enumerative constrained code mapping fixed-width bit blocks to DNA words.
//!
//! A word of length `L` is valid when its GC count lies in
//! `[ceil(0.4 L), floor(0.6 L)]` and no run of C or of G exceeds 3. Valid
//! words are ordered lexicographically (A < C < G < T) and the codeword for
//! index `i` is the `i`-th valid word, so no table has to be stored: ranking
//! and unranking walk a small completion-count DP instead. The two shipped
//! geometries map 18 bits to 10 nt and 22 bits to 13 nt.

use crate::error::{Error, Result};

pub const NUCLEOTIDES: [u8; 4] = *b"ACGT";

/// Longest permitted run of C and of G.
pub const MAX_CG_RUN: usize = 3;

/// Run-state trackers: neutral, or inside a C/G run of length 1..=3.
const RS_NEUTRAL: usize = 0;
const RS_C: usize = 1; // states 1..=3
const RS_G: usize = 4; // states 4..=6
const RS_COUNT: usize = 7;

/// GC window for a word length: `[ceil(0.4 L), floor(0.6 L)]`.
pub fn gc_window(len: usize) -> (usize, usize) {
    let lo = (2 * len).div_ceil(5);
    let hi = 3 * len / 5;
    (lo, hi)
}

/// Whether a word satisfies the GC-window and C/G-runlength constraints.
pub fn is_valid_word(word: &[u8]) -> bool {
    let (lo, hi) = gc_window(word.len());
    let mut gc = 0usize;
    let mut run_char = 0u8;
    let mut run_len = 0usize;
    for &c in word {
        match c {
            b'C' | b'G' => {
                gc += 1;
                if c == run_char {
                    run_len += 1;
                } else {
                    run_char = c;
                    run_len = 1;
                }
                if run_len > MAX_CG_RUN {
                    return false;
                }
            }
            b'A' | b'T' => {
                run_char = 0;
                run_len = 0;
            }
            _ => return false,
        }
    }
    gc >= lo && gc <= hi
}

/// Outcome of decoding a received word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDecode {
    pub bits: u64,
    /// True when the input was not a codeword and the nearest one was used.
    pub corrected: bool,
}

/// An index<->codeword bijection over the first `2^payload_bits` valid words.
#[derive(Debug, Clone)]
pub struct Codebook {
    block_len: usize,
    payload_bits: u32,
    gc_lo: usize,
    gc_hi: usize,
    /// completions[pos][gc_so_far][run_state] = number of valid suffixes.
    completions: Vec<u64>,
    total_valid: u64,
}

impl Codebook {
    /// Builds the completion-count tables and checks capacity.
    pub fn new(payload_bits: u32, block_len: usize) -> Result<Codebook> {
        if payload_bits == 0 || payload_bits > 63 || block_len == 0 || block_len > 31 {
            return Err(Error::invalid("unsupported codebook geometry"));
        }
        let (gc_lo, gc_hi) = gc_window(block_len);
        let dims = (block_len + 1) * (block_len + 1) * RS_COUNT;
        let mut completions = vec![0u64; dims];
        let at = |pos: usize, gc: usize, rs: usize| (pos * (block_len + 1) + gc) * RS_COUNT + rs;

        for gc in 0..=block_len {
            let ok = (gc >= gc_lo && gc <= gc_hi) as u64;
            for rs in 0..RS_COUNT {
                completions[at(block_len, gc, rs)] = ok;
            }
        }
        for pos in (0..block_len).rev() {
            for gc in 0..=pos {
                for rs in 0..RS_COUNT {
                    let mut total = 0u64;
                    for c in NUCLEOTIDES {
                        if let Some((ngc, nrs)) = step(gc, rs, c) {
                            total += completions[at(pos + 1, ngc, nrs)];
                        }
                    }
                    completions[at(pos, gc, rs)] = total;
                }
            }
        }
        let total_valid = completions[at(0, 0, RS_NEUTRAL)];
        if total_valid < 1u64 << payload_bits {
            return Err(Error::capacity(format!(
                "only {total_valid} valid {block_len}-nt words for {payload_bits} payload bits"
            )));
        }
        Ok(Codebook {
            block_len,
            payload_bits,
            gc_lo,
            gc_hi,
            completions,
            total_valid,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn payload_bits(&self) -> u32 {
        self.payload_bits
    }

    /// Number of indexable codewords, `2^payload_bits`.
    pub fn capacity(&self) -> u64 {
        1u64 << self.payload_bits
    }

    /// Number of constraint-satisfying words of this length.
    pub fn total_valid(&self) -> u64 {
        self.total_valid
    }

    pub fn gc_window(&self) -> (usize, usize) {
        (self.gc_lo, self.gc_hi)
    }

    fn completions_at(&self, pos: usize, gc: usize, rs: usize) -> u64 {
        self.completions[(pos * (self.block_len + 1) + gc) * RS_COUNT + rs]
    }

    /// Maps an index to the codeword at that rank in lexicographic order.
    pub fn encode_block(&self, bits: u64) -> Result<Vec<u8>> {
        if bits >= self.capacity() {
            return Err(Error::invalid(format!(
                "payload value {bits} exceeds {} bits",
                self.payload_bits
            )));
        }
        let mut remaining = bits;
        let mut gc = 0usize;
        let mut rs = RS_NEUTRAL;
        let mut word = Vec::with_capacity(self.block_len);
        for pos in 0..self.block_len {
            let mut placed = false;
            for c in NUCLEOTIDES {
                if let Some((ngc, nrs)) = step(gc, rs, c) {
                    let below = self.completions_at(pos + 1, ngc, nrs);
                    if remaining < below {
                        word.push(c);
                        gc = ngc;
                        rs = nrs;
                        placed = true;
                        break;
                    }
                    remaining -= below;
                }
            }
            debug_assert!(placed, "rank must stay below the completion count");
        }
        Ok(word)
    }

    /// Lexicographic rank of a valid word among all valid words.
    pub fn rank(&self, word: &[u8]) -> Option<u64> {
        if word.len() != self.block_len || !is_valid_word(word) {
            return None;
        }
        let mut rank = 0u64;
        let mut gc = 0usize;
        let mut rs = RS_NEUTRAL;
        for (pos, &chosen) in word.iter().enumerate() {
            for c in NUCLEOTIDES {
                if c == chosen {
                    break;
                }
                if let Some((ngc, nrs)) = step(gc, rs, c) {
                    rank += self.completions_at(pos + 1, ngc, nrs);
                }
            }
            let (ngc, nrs) = step(gc, rs, chosen)?;
            gc = ngc;
            rs = nrs;
        }
        Some(rank)
    }

    fn is_codeword(&self, word: &[u8]) -> Option<u64> {
        self.rank(word).filter(|&r| r < self.capacity())
    }

    /// Decodes a word to its payload bits. Non-codewords decode to the
    /// nearest codeword by Hamming distance (ties to the lexicographically
    /// smallest) with the corrected flag set.
    pub fn decode_block(&self, word: &[u8]) -> Result<BlockDecode> {
        if word.len() != self.block_len {
            return Err(Error::invalid(format!(
                "expected a {}-nt block, got {}",
                self.block_len,
                word.len()
            )));
        }
        if word.iter().any(|c| !NUCLEOTIDES.contains(c)) {
            return Err(Error::invalid("block contains a non-ACGT symbol"));
        }
        if let Some(rank) = self.is_codeword(word) {
            return Ok(BlockDecode {
                bits: rank,
                corrected: false,
            });
        }
        let nearest = self
            .nearest_codeword(word)
            .expect("a codeword always exists within block_len substitutions");
        Ok(BlockDecode {
            bits: self.is_codeword(&nearest).expect("nearest is a codeword"),
            corrected: true,
        })
    }

    /// Finds the nearest codeword by increasing Hamming distance; among
    /// equidistant codewords the lexicographically smallest wins.
    pub fn nearest_codeword(&self, word: &[u8]) -> Option<Vec<u8>> {
        for distance in 1..=self.block_len {
            let mut best: Option<Vec<u8>> = None;
            let mut positions = Vec::with_capacity(distance);
            self.search_at_distance(word, 0, distance, &mut positions, &mut best);
            if best.is_some() {
                return best;
            }
        }
        None
    }

    fn search_at_distance(
        &self,
        word: &[u8],
        from: usize,
        remaining: usize,
        positions: &mut Vec<usize>,
        best: &mut Option<Vec<u8>>,
    ) {
        if remaining == 0 {
            let mut candidate = word.to_vec();
            self.try_substitutions(&mut candidate, positions, 0, best);
            return;
        }
        if word.len() - from < remaining {
            return;
        }
        for pos in from..=word.len() - remaining {
            positions.push(pos);
            self.search_at_distance(word, pos + 1, remaining - 1, positions, best);
            positions.pop();
        }
    }

    fn try_substitutions(
        &self,
        candidate: &mut Vec<u8>,
        positions: &[usize],
        depth: usize,
        best: &mut Option<Vec<u8>>,
    ) {
        if depth == positions.len() {
            if self.is_codeword(candidate).is_some()
                && best.as_ref().is_none_or(|b| candidate[..] < b[..])
            {
                *best = Some(candidate.clone());
            }
            return;
        }
        let pos = positions[depth];
        let original = candidate[pos];
        for c in NUCLEOTIDES {
            if c == original {
                continue;
            }
            candidate[pos] = c;
            self.try_substitutions(candidate, positions, depth + 1, best);
        }
        candidate[pos] = original;
    }
}

/// Constraint-state transition for appending one nucleotide; `None` when the
/// run limit would be exceeded.
fn step(gc: usize, rs: usize, c: u8) -> Option<(usize, usize)> {
    match c {
        b'A' | b'T' => Some((gc, RS_NEUTRAL)),
        b'C' => {
            let run = if (RS_C..RS_C + 3).contains(&rs) {
                rs - RS_C + 1
            } else {
                0
            };
            if run + 1 > MAX_CG_RUN {
                None
            } else {
                Some((gc + 1, RS_C + run))
            }
        }
        b'G' => {
            let run = if (RS_G..RS_G + 3).contains(&rs) {
                rs - RS_G + 1
            } else {
                0
            };
            if run + 1 > MAX_CG_RUN {
                None
            } else {
                Some((gc + 1, RS_G + run))
            }
        }
        _ => None,
    }
}
