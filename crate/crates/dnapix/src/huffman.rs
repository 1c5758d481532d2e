//! Canonical Huffman coding over differential-stream symbols.
//!
//! One table is built per image from the pooled symbols of all 24
//! (color, level) streams. The table is serialized as sorted symbols plus
//! code lengths; codewords are reassigned canonically on load. Emitted bits
//! are MSB-first within bytes.

use std::collections::{BTreeMap, HashMap};

use crate::bits::{BitReader, BitString};
use crate::error::{Error, Result};
use crate::levels::{Symbol, TERMINATOR};

const MAX_CODE_LEN: usize = 63;

/// A canonical prefix code over an explicit symbol alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    /// (symbol, code length) sorted by symbol; the canonical serialized form.
    lengths: Vec<(Symbol, u8)>,
    encode_map: HashMap<Symbol, (u64, u8)>,
    // Canonical decoding tables indexed by code length.
    first_code: Vec<u64>,
    first_index: Vec<usize>,
    count: Vec<usize>,
    /// Symbols sorted by (length, symbol); decoding indexes into this.
    by_code: Vec<Symbol>,
}

impl HuffmanTable {
    /// Builds an optimal code from symbol frequencies.
    pub fn build(counts: &BTreeMap<Symbol, u64>) -> Result<HuffmanTable> {
        if counts.is_empty() {
            return Err(Error::invalid("cannot build a code over an empty alphabet"));
        }
        if counts.values().any(|&c| c == 0) {
            return Err(Error::invalid("zero-frequency symbol in alphabet"));
        }
        let lengths = if counts.len() == 1 {
            // Degenerate alphabet: a single 1-bit code keeps decode well-formed.
            vec![(*counts.keys().next().unwrap(), 1u8)]
        } else {
            tree_code_lengths(counts)
        };
        Self::from_lengths(lengths)
    }

    /// Builds the table from pooled streams.
    pub fn from_streams<'a, I>(streams: I) -> Result<HuffmanTable>
    where
        I: IntoIterator<Item = &'a [Symbol]>,
    {
        let mut counts = BTreeMap::new();
        for stream in streams {
            for &s in stream {
                *counts.entry(s).or_insert(0u64) += 1;
            }
        }
        Self::build(&counts)
    }

    /// Reconstructs a table from its canonical serialized form.
    pub fn from_lengths(mut lengths: Vec<(Symbol, u8)>) -> Result<HuffmanTable> {
        if lengths.is_empty() {
            return Err(Error::invalid("empty code table"));
        }
        lengths.sort_unstable();
        lengths.dedup_by_key(|e| e.0);
        let max_len = lengths.iter().map(|&(_, l)| l as usize).max().unwrap();
        if max_len > MAX_CODE_LEN || lengths.iter().any(|&(_, l)| l == 0) {
            return Err(Error::invalid("code length out of range"));
        }
        // Kraft sum must not exceed 1 or the code is not prefix-free.
        let kraft: u128 = lengths
            .iter()
            .map(|&(_, l)| 1u128 << (MAX_CODE_LEN - l as usize))
            .sum();
        if kraft > 1u128 << MAX_CODE_LEN {
            return Err(Error::invalid("code lengths violate the Kraft inequality"));
        }

        let mut by_code: Vec<(Symbol, u8)> = lengths.clone();
        by_code.sort_unstable_by_key(|&(s, l)| (l, s));

        let mut count = vec![0usize; max_len + 1];
        for &(_, l) in &by_code {
            count[l as usize] += 1;
        }
        let mut first_code = vec![0u64; max_len + 1];
        let mut first_index = vec![0usize; max_len + 1];
        let mut code = 0u64;
        let mut index = 0usize;
        for len in 1..=max_len {
            code <<= 1;
            first_code[len] = code;
            first_index[len] = index;
            code += count[len] as u64;
            index += count[len];
        }

        let mut encode_map = HashMap::with_capacity(by_code.len());
        let mut next = first_code.clone();
        for &(sym, l) in &by_code {
            encode_map.insert(sym, (next[l as usize], l));
            next[l as usize] += 1;
        }

        Ok(HuffmanTable {
            lengths,
            encode_map,
            first_code,
            first_index,
            count,
            by_code: by_code.into_iter().map(|(s, _)| s).collect(),
        })
    }

    /// Canonical serialized form: (symbol, code length) sorted by symbol.
    pub fn lengths(&self) -> &[(Symbol, u8)] {
        &self.lengths
    }

    pub fn alphabet_len(&self) -> usize {
        self.lengths.len()
    }

    pub fn code_len(&self, sym: Symbol) -> Option<u8> {
        self.encode_map.get(&sym).map(|&(_, l)| l)
    }

    pub fn codeword(&self, sym: Symbol) -> Option<(u64, u8)> {
        self.encode_map.get(&sym).copied()
    }

    /// Mean code length in bits under the given frequencies.
    pub fn mean_code_length(&self, counts: &BTreeMap<Symbol, u64>) -> f64 {
        let total: u64 = counts.values().sum();
        let bits: u64 = counts
            .iter()
            .map(|(&s, &c)| c * self.code_len(s).expect("symbol in table") as u64)
            .sum();
        bits as f64 / total as f64
    }

    /// Appends the code for one symbol.
    pub fn encode_symbol(&self, sym: Symbol, out: &mut BitString) -> Result<()> {
        let &(code, len) = self
            .encode_map
            .get(&sym)
            .ok_or(Error::UnknownSymbol(sym))?;
        out.push_bits(code, len);
        Ok(())
    }

    /// Encodes a whole stream of symbols.
    pub fn encode_stream(&self, stream: &[Symbol]) -> Result<BitString> {
        let mut out = BitString::new();
        for &s in stream {
            self.encode_symbol(s, &mut out)?;
        }
        Ok(out)
    }

    /// Decodes one symbol; `None` if the remaining bits cannot complete a
    /// codeword (reader is left where it stopped).
    pub fn decode_symbol(&self, reader: &mut BitReader<'_>) -> Option<Symbol> {
        let mut code = 0u64;
        let max_len = self.count.len() - 1;
        for len in 1..=max_len {
            code = code << 1 | reader.read_bit()? as u64;
            if self.count[len] > 0 {
                let offset = code.wrapping_sub(self.first_code[len]);
                if code >= self.first_code[len] && (offset as usize) < self.count[len] {
                    return Some(self.by_code[self.first_index[len] + offset as usize]);
                }
            }
        }
        None
    }
}

/// A decoded stream plus whether its terminator was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedStream {
    pub symbols: Vec<Symbol>,
    pub terminated: bool,
}

/// Greedy prefix decoding; stops after the stream terminator and ignores any
/// remaining padding bits.
pub fn decode_stream(table: &HuffmanTable, bits: &BitString) -> DecodedStream {
    let mut reader = bits.reader();
    let mut symbols = Vec::new();
    let mut terminated = false;
    while let Some(sym) = table.decode_symbol(&mut reader) {
        symbols.push(sym);
        if sym == TERMINATOR {
            terminated = true;
            break;
        }
    }
    DecodedStream {
        symbols,
        terminated,
    }
}

/// Shannon entropy in bits/symbol of a frequency map.
pub fn empirical_entropy(counts: &BTreeMap<Symbol, u64>) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Huffman code lengths via a deterministic two-queue-free heap build.
fn tree_code_lengths(counts: &BTreeMap<Symbol, u64>) -> Vec<(Symbol, u8)> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    struct Node {
        parent: Option<usize>,
    }

    let symbols: Vec<Symbol> = counts.keys().copied().collect();
    let mut nodes: Vec<Node> = (0..symbols.len()).map(|_| Node { parent: None }).collect();
    // (weight, creation order) makes merges fully deterministic.
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = counts
        .values()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i)))
        .collect();
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        let merged = nodes.len();
        nodes.push(Node { parent: None });
        nodes[a].parent = Some(merged);
        nodes[b].parent = Some(merged);
        heap.push(Reverse((wa + wb, merged)));
    }

    symbols
        .into_iter()
        .enumerate()
        .map(|(i, sym)| {
            let mut depth = 0u8;
            let mut node = i;
            while let Some(p) = nodes[node].parent {
                depth += 1;
                node = p;
            }
            (sym, depth)
        })
        .collect()
}
