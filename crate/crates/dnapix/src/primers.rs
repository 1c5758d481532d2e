//! Seeded random design of the 8 level-selecting primer pairs.
//!
//! All 16 primers are kept at pairwise Hamming distance >= 10 so reads
//! cannot be attributed to the wrong level. Candidates are drawn with a GC
//! count of exactly 10, which fixes the Wallace melting temperature at
//! 2(A+T) + 4(G+C) = 60 C for every primer and makes within-pair matching
//! trivial.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constrained::NUCLEOTIDES;
use crate::error::{Error, Result};
use crate::oligo::{hamming, PRIMER_LEN};
use crate::pixels::LEVELS;

pub const MIN_PRIMER_DISTANCE: usize = 10;
pub const MAX_PAIR_TM_DELTA: i64 = 2;
const DEFAULT_ATTEMPTS: usize = 100_000;

/// Wallace-rule melting temperature: `2 * (A + T) + 4 * (G + C)`.
pub fn wallace_tm(seq: &[u8]) -> i64 {
    seq.iter()
        .map(|&c| match c {
            b'G' | b'C' => 4i64,
            _ => 2,
        })
        .sum()
}

/// A forward/reverse primer pair amplifying one intensity level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimerPair {
    forward: String,
    reverse: String,
}

impl PrimerPair {
    pub fn forward(&self) -> &[u8] {
        self.forward.as_bytes()
    }

    pub fn reverse(&self) -> &[u8] {
        self.reverse.as_bytes()
    }

    pub fn tm_delta(&self) -> i64 {
        (wallace_tm(self.forward()) - wallace_tm(self.reverse())).abs()
    }
}

/// The 8 primer pairs, indexed by intensity level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimerSet {
    pairs: Vec<PrimerPair>,
}

impl PrimerSet {
    pub fn from_pairs(pairs: Vec<PrimerPair>) -> Result<PrimerSet> {
        if pairs.len() != LEVELS {
            return Err(Error::invalid(format!(
                "expected {LEVELS} primer pairs, got {}",
                pairs.len()
            )));
        }
        let set = PrimerSet { pairs };
        if set.min_pairwise_distance() < MIN_PRIMER_DISTANCE {
            return Err(Error::invalid("primer set violates the distance bound"));
        }
        Ok(set)
    }

    pub fn pairs(&self) -> &[PrimerPair] {
        &self.pairs
    }

    pub fn pair_for_level(&self, level: u8) -> &PrimerPair {
        &self.pairs[level as usize]
    }

    /// Level whose pair contains this primer, if any.
    pub fn level_of(&self, primer: &[u8]) -> Option<u8> {
        self.pairs.iter().position(|p| {
            p.forward() == primer || p.reverse() == primer
        }).map(|i| i as u8)
    }

    pub fn all_primers(&self) -> Vec<&[u8]> {
        self.pairs
            .iter()
            .flat_map(|p| [p.forward(), p.reverse()])
            .collect()
    }

    pub fn min_pairwise_distance(&self) -> usize {
        let primers = self.all_primers();
        let mut min = PRIMER_LEN;
        for (i, a) in primers.iter().enumerate() {
            for b in &primers[i + 1..] {
                min = min.min(hamming(a, b));
            }
        }
        min
    }
}

/// Designs the 8 primer pairs by seeded rejection sampling.
pub fn design_primers(seed: u64) -> Result<PrimerSet> {
    design_primers_with_budget(seed, DEFAULT_ATTEMPTS)
}

pub fn design_primers_with_budget(seed: u64, attempts: usize) -> Result<PrimerSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<Vec<u8>> = Vec::with_capacity(2 * LEVELS);
    let mut tries = 0usize;
    while accepted.len() < 2 * LEVELS {
        tries += 1;
        if tries > attempts {
            return Err(Error::capacity(format!(
                "primer search exhausted after {attempts} attempts"
            )));
        }
        let candidate: Vec<u8> = (0..PRIMER_LEN)
            .map(|_| NUCLEOTIDES[rng.random_range(0..4)])
            .collect();
        let gc = candidate
            .iter()
            .filter(|&&c| c == b'C' || c == b'G')
            .count();
        if gc != PRIMER_LEN / 2 {
            continue;
        }
        if accepted
            .iter()
            .all(|p| hamming(p, &candidate) >= MIN_PRIMER_DISTANCE)
        {
            accepted.push(candidate);
        }
    }
    let pairs = accepted
        .chunks_exact(2)
        .map(|pair| PrimerPair {
            forward: String::from_utf8(pair[0].clone()).expect("ACGT is valid UTF-8"),
            reverse: String::from_utf8(pair[1].clone()).expect("ACGT is valid UTF-8"),
        })
        .collect();
    PrimerSet::from_pairs(pairs)
}
