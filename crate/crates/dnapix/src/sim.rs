//! Write-read channel simulation: oligo dropout, symbol substitutions,
//! coverage-sampled noisy reads and consensus calling.
//!
//! All randomness flows through explicit seeds. Per-oligo work derives its
//! own sub-seed from (seed, oligo index), so parallel and serial execution
//! would produce identical output.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::encoder::PoolRecord;
use crate::error::{Error, Result};
use crate::oligo::OligoId;

const NT: [u8; 4] = *b"ACGT";

/// Domain tags keep the sub-seed streams of different stages disjoint.
mod domain {
    pub const DROP: u64 = 0x01;
    pub const SUBSTITUTE: u64 = 0x02;
    pub const READS: u64 = 0x03;
}

/// splitmix64; mixes (seed, domain, index) into one RNG seed.
fn subseed(seed: u64, domain: u64, index: u64) -> u64 {
    let mut z = seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(subseed(seed, domain, index))
}

/// Removes `count` oligos uniformly at random without replacement.
pub fn drop_oligos(
    pool: &[PoolRecord],
    count: usize,
    seed: u64,
) -> Result<(Vec<PoolRecord>, Vec<OligoId>)> {
    if count > pool.len() {
        return Err(Error::invalid(format!(
            "cannot drop {count} of {} oligos",
            pool.len()
        )));
    }
    let mut rng = rng_for(seed, domain::DROP, 0);
    // Partial Fisher-Yates over the index set.
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    for i in 0..count {
        let j = rng.random_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut dropped: Vec<usize> = indices[..count].to_vec();
    dropped.sort_unstable();
    let dropped_ids: Vec<OligoId> = dropped.iter().map(|&i| pool[i].id).collect();
    let drop_set: std::collections::HashSet<usize> = dropped.into_iter().collect();
    let kept = pool
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop_set.contains(i))
        .map(|(_, r)| r.clone())
        .collect();
    Ok((kept, dropped_ids))
}

/// Applies i.i.d. per-position substitutions; a hit becomes a uniformly
/// random different nucleotide. Returns the changed-position count.
pub fn substitute_symbols(
    pool: &[PoolRecord],
    rate: f64,
    seed: u64,
) -> Result<(Vec<PoolRecord>, u64)> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid("substitution rate must be in [0, 1]"));
    }
    let mut changed = 0u64;
    let out = pool
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut rng = rng_for(seed, domain::SUBSTITUTE, i as u64);
            let mut seq = rec.seq.clone();
            for nt in seq.iter_mut() {
                if rate > 0.0 && rng.random_bool(rate) {
                    *nt = substitute_nt(*nt, &mut rng);
                    changed += 1;
                }
            }
            PoolRecord { id: rec.id, seq }
        })
        .collect();
    Ok((out, changed))
}

fn substitute_nt(original: u8, rng: &mut ChaCha8Rng) -> u8 {
    loop {
        let candidate = NT[rng.random_range(0..4)];
        if candidate != original {
            return candidate;
        }
    }
}

/// Noisy reads of one source oligo; grouping is ground truth that only
/// evaluation code may rely on.
#[derive(Debug, Clone)]
pub struct ReadGroup {
    pub source: OligoId,
    pub reads: Vec<Vec<u8>>,
}

#[derive(Debug, Clone)]
pub struct ReadSet {
    pub groups: Vec<ReadGroup>,
}

impl ReadSet {
    pub fn total_reads(&self) -> usize {
        self.groups.iter().map(|g| g.reads.len()).sum()
    }
}

/// Draws Poisson(coverage) reads per oligo, each with i.i.d. substitutions.
pub fn generate_reads(
    pool: &[PoolRecord],
    coverage: f64,
    per_base_error: f64,
    seed: u64,
) -> Result<ReadSet> {
    if coverage < 1.0 {
        return Err(Error::invalid("coverage must be at least 1"));
    }
    if !(0.0..=1.0).contains(&per_base_error) {
        return Err(Error::invalid("per-base error must be in [0, 1]"));
    }
    let poisson =
        Poisson::new(coverage).map_err(|e| Error::invalid(format!("bad coverage: {e}")))?;
    let groups = pool
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut rng = rng_for(seed, domain::READS, i as u64);
            let n = poisson.sample(&mut rng) as usize;
            let reads = (0..n)
                .map(|_| {
                    let mut read = rec.seq.clone();
                    for nt in read.iter_mut() {
                        if per_base_error > 0.0 && rng.random_bool(per_base_error) {
                            *nt = substitute_nt(*nt, &mut rng);
                        }
                    }
                    read
                })
                .collect();
            ReadGroup {
                source: rec.id,
                reads,
            }
        })
        .collect();
    Ok(ReadSet { groups })
}

/// Generates reads with a fixed count per oligo instead of Poisson sampling;
/// used by the consensus-quality experiments.
pub fn generate_reads_fixed(
    pool: &[PoolRecord],
    reads_per_oligo: usize,
    per_base_error: f64,
    seed: u64,
) -> Result<ReadSet> {
    if reads_per_oligo == 0 {
        return Err(Error::invalid("need at least one read per oligo"));
    }
    let groups = pool
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut rng = rng_for(seed, domain::READS, i as u64);
            let reads = (0..reads_per_oligo)
                .map(|_| {
                    let mut read = rec.seq.clone();
                    for nt in read.iter_mut() {
                        if per_base_error > 0.0 && rng.random_bool(per_base_error) {
                            *nt = substitute_nt(*nt, &mut rng);
                        }
                    }
                    read
                })
                .collect();
            ReadGroup {
                source: rec.id,
                reads,
            }
        })
        .collect();
    Ok(ReadSet { groups })
}

/// Position-wise plurality vote; ties break by fixed nucleotide order
/// A < C < G < T.
pub fn consensus(reads: &[Vec<u8>]) -> Result<Vec<u8>> {
    let first = reads
        .first()
        .ok_or_else(|| Error::invalid("empty read group: the oligo is missing"))?;
    let len = first.len();
    if reads.iter().any(|r| r.len() != len) {
        return Err(Error::invalid("reads differ in length"));
    }
    let mut out = Vec::with_capacity(len);
    for pos in 0..len {
        let mut counts = [0usize; 4];
        for read in reads {
            if let Some(i) = NT.iter().position(|&n| n == read[pos]) {
                counts[i] += 1;
            }
        }
        let best = (0..4)
            .max_by_key(|&i| (counts[i], std::cmp::Reverse(i)))
            .expect("four candidates");
        out.push(NT[best]);
    }
    Ok(out)
}

/// Collapses a read set into consensus oligos. Zero-read groups are the
/// effective dropouts and are reported separately.
pub fn consensus_pool(read_set: &ReadSet) -> (Vec<PoolRecord>, Vec<OligoId>) {
    let mut pool = Vec::new();
    let mut missing = Vec::new();
    for group in &read_set.groups {
        match consensus(&group.reads) {
            Ok(seq) => pool.push(PoolRecord {
                id: group.source,
                seq,
            }),
            Err(_) => missing.push(group.source),
        }
    }
    (pool, missing)
}

/// Ground-truth damage record written alongside simulated pools.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DamageLog {
    pub seed: u64,
    pub dropped: Vec<String>,
    pub substituted_positions: u64,
    pub zero_read_oligos: Vec<String>,
    pub coverage: Option<f64>,
    pub per_base_error: Option<f64>,
    pub substitution_rate: f64,
}

impl DamageLog {
    pub fn total_damage_events(&self) -> u64 {
        self.dropped.len() as u64 + self.substituted_positions + self.zero_read_oligos.len() as u64
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("damage log serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<DamageLog> {
        let data = std::fs::read_to_string(path)?;
        serde_json::from_str(&data).map_err(|e| Error::format(format!("damage log parse: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixels::ColorTag;

    fn pool(n: usize) -> Vec<PoolRecord> {
        (0..n)
            .map(|i| PoolRecord {
                id: OligoId {
                    image: 0,
                    color: ColorTag::R,
                    level: (i % 8) as u8,
                    block: (i / 8) as u16,
                },
                seq: (0..196).map(|j| NT[(i + j) % 4]).collect(),
            })
            .collect()
    }

    #[test]
    fn drop_zero_is_identity() {
        let p = pool(50);
        let (kept, dropped) = drop_oligos(&p, 0, 1).unwrap();
        assert_eq!(kept, p);
        assert!(dropped.is_empty());
    }

    #[test]
    fn drop_counts_and_determinism() {
        let p = pool(100);
        let (kept_a, dropped_a) = drop_oligos(&p, 10, 33).unwrap();
        let (kept_b, dropped_b) = drop_oligos(&p, 10, 33).unwrap();
        assert_eq!(kept_a.len(), 90);
        assert_eq!(dropped_a.len(), 10);
        assert_eq!(dropped_a, dropped_b);
        assert_eq!(kept_a, kept_b);
        let (_, dropped_c) = drop_oligos(&p, 10, 34).unwrap();
        assert_ne!(dropped_a, dropped_c);
    }

    #[test]
    fn drop_more_than_pool_is_an_error() {
        let p = pool(5);
        assert!(drop_oligos(&p, 6, 0).is_err());
    }

    #[test]
    fn substitute_rate_zero_is_identity() {
        let p = pool(20);
        let (out, changed) = substitute_symbols(&p, 0.0, 9).unwrap();
        assert_eq!(out, p);
        assert_eq!(changed, 0);
    }

    #[test]
    fn substitute_rate_one_changes_every_position() {
        let p = pool(5);
        let (out, changed) = substitute_symbols(&p, 1.0, 9).unwrap();
        assert_eq!(changed, 5 * 196);
        for (a, b) in p.iter().zip(&out) {
            assert!(a.seq.iter().zip(&b.seq).all(|(x, y)| x != y));
        }
    }

    #[test]
    fn substitution_count_is_within_4_sigma() {
        let p = pool(300);
        let rate = 1e-2;
        let (_, changed) = substitute_symbols(&p, rate, 5).unwrap();
        let n = (300 * 196) as f64;
        let mean = n * rate;
        let sigma = (n * rate * (1.0 - rate)).sqrt();
        assert!((changed as f64 - mean).abs() < 4.0 * sigma);
    }

    #[test]
    fn reads_at_zero_error_equal_sources() {
        let p = pool(10);
        let rs = generate_reads(&p, 3.0, 0.0, 2).unwrap();
        for group in &rs.groups {
            let source = &p.iter().find(|r| r.id == group.source).unwrap().seq;
            for read in &group.reads {
                assert_eq!(read, source);
            }
        }
    }

    #[test]
    fn poisson_mean_read_count_is_close_to_coverage() {
        let p = pool(2000);
        let coverage = 7.0;
        let rs = generate_reads(&p, coverage, 0.0, 11).unwrap();
        let total = rs.total_reads() as f64;
        let n = p.len() as f64;
        let sigma = (n * coverage).sqrt();
        assert!((total - n * coverage).abs() < 4.0 * sigma);
    }

    #[test]
    fn zero_read_frequency_matches_poisson_tail() {
        let p = pool(3000);
        let coverage = 3.0;
        let rs = generate_reads(&p, coverage, 0.0, 13).unwrap();
        let zero = rs.groups.iter().filter(|g| g.reads.is_empty()).count() as f64;
        let expect = (p.len() as f64) * (-coverage).exp();
        let sigma = expect.sqrt().max(1.0);
        assert!((zero - expect).abs() < 5.0 * sigma, "zero={zero} expect={expect}");
    }

    #[test]
    fn consensus_majority_and_ties() {
        let reads = vec![b"ACGT".to_vec(), b"ACGT".to_vec(), b"ATGT".to_vec()];
        assert_eq!(consensus(&reads).unwrap(), b"ACGT".to_vec());
        // 1-1 tie at position 0 resolves to the alphabetically first.
        let tied = vec![b"T".to_vec(), b"A".to_vec()];
        assert_eq!(consensus(&tied).unwrap(), b"A".to_vec());
    }

    #[test]
    fn consensus_of_single_read_is_that_read() {
        let reads = vec![b"ACGTACGT".to_vec()];
        assert_eq!(consensus(&reads).unwrap(), reads[0]);
    }

    #[test]
    fn consensus_of_empty_group_is_an_error() {
        assert!(consensus(&[]).is_err());
    }

    #[test]
    fn error_free_consensus_equals_source() {
        let p = pool(30);
        let rs = generate_reads(&p, 5.0, 0.0, 21).unwrap();
        let (cons, missing) = consensus_pool(&rs);
        for rec in &cons {
            let source = &p.iter().find(|r| r.id == rec.id).unwrap().seq;
            assert_eq!(&rec.seq, source);
        }
        assert_eq!(cons.len() + missing.len(), p.len());
    }
}
