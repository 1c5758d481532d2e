//! Growable bit buffer with MSB-first bit order within bytes.
//!
//! All bitstreams in the codec (Huffman output, oligo payloads) use this
//! convention: bit `i` of a stream lives at `bytes[i / 8] >> (7 - i % 8)`.

/// An owned bit string.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Reconstructs a bit string from raw bytes; `len` trailing bits are kept.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length exceeds byte storage");
        let mut s = BitString { bytes, len };
        s.clear_tail();
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let byte = self.len / 8;
            self.bytes[byte] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u8) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.push_bit(value >> i & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push_bit(other.bit(i));
        }
    }

    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        self.bytes[index / 8] >> (7 - index % 8) & 1 == 1
    }

    /// Copies bits `[start, end)` into a new bit string.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "slice out of range");
        let mut out = BitString::with_capacity(end - start);
        for i in start..end {
            out.push_bit(self.bit(i));
        }
        out
    }

    /// Appends zero bits until the length is a multiple of `align`.
    pub fn pad_to_multiple(&mut self, align: usize) {
        assert!(align > 0);
        while !self.len.is_multiple_of(align) {
            self.push_bit(false);
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    pub fn reader_at(&self, pos: usize) -> BitReader<'_> {
        assert!(pos <= self.len);
        BitReader { bits: self, pos }
    }

    fn clear_tail(&mut self) {
        // Zero any storage bits past len so equality is structural.
        let full = self.len / 8;
        if !self.len.is_multiple_of(8) {
            let keep = self.len % 8;
            let mask = !0u8 << (8 - keep);
            if let Some(b) = self.bytes.get_mut(full) {
                *b &= mask;
            }
        }
        self.bytes.truncate(self.len.div_ceil(8));
    }
}

impl std::fmt::Debug for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitString[{}; ", self.len)?;
        for i in 0..self.len.min(64) {
            write!(f, "{}", self.bit(i) as u8)?;
        }
        if self.len > 64 {
            write!(f, "...")?;
        }
        write!(f, "]")
    }
}

/// Cursor over a [`BitString`].
#[derive(Clone)]
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn seek(&mut self, pos: usize) {
        assert!(pos <= self.bits.len());
        self.pos = pos;
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        if self.pos >= self.bits.len() {
            return None;
        }
        let b = self.bits.bit(self.pos);
        self.pos += 1;
        Some(b)
    }

    /// Reads `count` bits MSB-first; `None` if fewer remain (position unchanged).
    pub fn read_bits(&mut self, count: u8) -> Option<u64> {
        debug_assert!(count <= 64);
        if self.remaining() < count as usize {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = v << 1 | self.read_bit().unwrap() as u64;
        }
        Some(v)
    }
}
