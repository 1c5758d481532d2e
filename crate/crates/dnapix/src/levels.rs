//! Per-level index streams: partition, tolerant merge, and differential
//! coding with resynchronization markers.
//!
//! A linearized channel is decomposed into 8 index lists, one per intensity
//! level. Each list is stored as differences between consecutive indices.
//! A `-1` marker followed by an absolute index is emitted at the start and
//! then every `ceil(1/rate)` entries so a damaged stretch cannot corrupt the
//! rest of the stream; a single `-2` terminates the stream. Since the lists
//! are strictly increasing, the sentinels can never collide with data.

use crate::pixels::LEVELS;

/// Differential stream symbol. Data symbols are non-negative; `-1` and `-2`
/// are reserved for the resync marker and the terminator.
pub type Symbol = i64;

pub const RESYNC: Symbol = -1;
pub const TERMINATOR: Symbol = -2;

/// Marker spacing for a given resync rate: one absolute value every
/// `ceil(1/rate)` list entries.
pub fn resync_period(rate: f64) -> usize {
    assert!(rate > 0.0 && rate <= 1.0, "resync rate must be in (0, 1]");
    (1.0 / rate).ceil() as usize
}

/// Splits a level vector into 8 strictly increasing index lists.
pub fn partition_levels(vector: &[u8]) -> [Vec<u32>; 8] {
    let mut lists: [Vec<u32>; 8] = Default::default();
    for (i, &v) in vector.iter().enumerate() {
        lists[v as usize].push(i as u32);
    }
    lists
}

/// Result of merging level lists back into a vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    /// Reconstructed level per position; unclaimed positions fall back to 0.
    pub values: Vec<u8>,
    /// True where a position was claimed by zero or by multiple levels.
    pub unknown: Vec<bool>,
}

/// Loss-tolerant inverse of [`partition_levels`].
///
/// Positions claimed by exactly one level take that level. Unclaimed
/// positions become level 0 and are flagged; positions claimed by several
/// levels take the lowest claimant and are flagged. Out-of-range indices are
/// ignored.
pub fn merge_levels(lists: &[Vec<u32>; 8], length: usize) -> MergeOutcome {
    // Bitmask of claiming levels per position.
    let mut claims = vec![0u8; length];
    for (level, list) in lists.iter().enumerate() {
        for &idx in list {
            if (idx as usize) < length {
                claims[idx as usize] |= 1 << level;
            }
        }
    }
    let mut values = vec![0u8; length];
    let mut unknown = vec![false; length];
    for (pos, &mask) in claims.iter().enumerate() {
        match mask.count_ones() {
            0 => unknown[pos] = true,
            1 => values[pos] = mask.trailing_zeros() as u8,
            _ => {
                values[pos] = mask.trailing_zeros() as u8;
                unknown[pos] = true;
            }
        }
    }
    debug_assert!(values.iter().all(|&v| (v as usize) < LEVELS));
    MergeOutcome { values, unknown }
}

/// Differential encoding with periodic absolute-value resync markers.
pub fn diff_encode(indices: &[u32], resync_rate: f64) -> Vec<Symbol> {
    let period = resync_period(resync_rate);
    let mut out = Vec::with_capacity(indices.len() + 2 * (indices.len() / period + 1) + 1);
    for (k, &idx) in indices.iter().enumerate() {
        if k % period == 0 {
            out.push(RESYNC);
            out.push(idx as Symbol);
        } else {
            let diff = idx as Symbol - indices[k - 1] as Symbol;
            debug_assert!(diff > 0, "index list must be strictly increasing");
            out.push(diff);
        }
    }
    out.push(TERMINATOR);
    out
}

/// Outcome of decoding a differential stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffDecode {
    pub indices: Vec<u32>,
    /// Symbols discarded while waiting for the next resync marker.
    pub dropped_symbols: usize,
    /// Number of times decoding had to abandon a run.
    pub truncated_runs: usize,
    /// Whether the terminator was seen.
    pub terminated: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DiffState {
    /// Waiting for a resync marker (stream start or after corruption).
    Seeking,
    /// Marker seen; the next symbol is an absolute index.
    Absolute,
    /// Inside a run of differences.
    Run,
}

/// Decodes a differential stream, tolerating corrupted stretches.
///
/// On a clean stream this is the exact inverse of [`diff_encode`]. When a
/// symbol is implausible (non-positive difference, absolute value that does
/// not increase), decoding drops symbols until the next `-1` marker rather
/// than guessing.
pub fn diff_decode(stream: &[Symbol]) -> DiffDecode {
    let mut out = DiffDecode {
        indices: Vec::new(),
        dropped_symbols: 0,
        truncated_runs: 0,
        terminated: false,
    };
    let mut state = DiffState::Seeking;
    let mut seeking_noted = false;
    let mut last: Option<u32> = None;

    for &sym in stream {
        if sym == TERMINATOR {
            out.terminated = true;
            break;
        }
        if sym == RESYNC {
            state = DiffState::Absolute;
            seeking_noted = false;
            continue;
        }
        match state {
            DiffState::Seeking => {
                if !seeking_noted {
                    out.truncated_runs += 1;
                    seeking_noted = true;
                }
                out.dropped_symbols += 1;
            }
            DiffState::Absolute => {
                let plausible = sym >= 0
                    && sym <= u32::MAX as Symbol
                    && last.is_none_or(|l| sym > l as Symbol);
                if plausible {
                    out.indices.push(sym as u32);
                    last = Some(sym as u32);
                    state = DiffState::Run;
                } else {
                    out.dropped_symbols += 1;
                    out.truncated_runs += 1;
                    seeking_noted = true;
                    state = DiffState::Seeking;
                }
            }
            DiffState::Run => {
                let next = last.map(|l| l as Symbol + sym);
                let plausible = sym > 0 && next.is_some_and(|n| n <= u32::MAX as Symbol);
                if let (true, Some(next)) = (plausible, next) {
                    out.indices.push(next as u32);
                    last = Some(next as u32);
                } else {
                    out.dropped_symbols += 1;
                    out.truncated_runs += 1;
                    seeking_noted = true;
                    state = DiffState::Seeking;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partitions_the_worked_vector() {
        let v = [0u8, 0, 0, 1, 7, 6, 7, 7];
        let lists = partition_levels(&v);
        assert_eq!(lists[0], vec![0, 1, 2]);
        assert_eq!(lists[1], vec![3]);
        assert_eq!(lists[6], vec![5]);
        assert_eq!(lists[7], vec![4, 6, 7]);
        for level in [2, 3, 4, 5] {
            assert!(lists[level].is_empty());
        }
    }

    #[test]
    fn constant_vector_fills_one_level() {
        let v = vec![7u8; 10];
        let lists = partition_levels(&v);
        assert_eq!(lists[7], (0..10).collect::<Vec<u32>>());
        assert!(lists[..7].iter().all(|l| l.is_empty()));
    }

    #[test]
    fn merge_restores_complete_partition() {
        let v = [0u8, 0, 0, 1, 7, 6, 7, 7];
        let merged = merge_levels(&partition_levels(&v), v.len());
        assert_eq!(merged.values, v);
        assert!(merged.unknown.iter().all(|&u| !u));
    }

    #[test]
    fn missing_level_block_masks_its_positions() {
        let v = [0u8, 0, 0, 1, 7, 6, 7, 7];
        let mut lists = partition_levels(&v);
        lists[7].clear(); // simulate the level-7 block being lost
        let merged = merge_levels(&lists, v.len());
        for pos in [4usize, 6, 7] {
            assert_eq!(merged.values[pos], 0);
            assert!(merged.unknown[pos]);
        }
        assert_eq!(&merged.values[..4], &[0, 0, 0, 1]);
        assert!(!merged.unknown[3]);
    }

    #[test]
    fn overlapping_claim_takes_lowest_level_and_masks() {
        let mut lists: [Vec<u32>; 8] = Default::default();
        lists[1] = vec![3];
        lists[2] = vec![3];
        let merged = merge_levels(&lists, 5);
        assert_eq!(merged.values[3], 1);
        assert!(merged.unknown[3]);
    }

    #[test]
    fn out_of_range_indices_are_ignored() {
        let mut lists: [Vec<u32>; 8] = Default::default();
        lists[5] = vec![0, 99];
        let merged = merge_levels(&lists, 2);
        assert_eq!(merged.values[0], 5);
        assert!(!merged.unknown[0]);
        assert!(merged.unknown[1]);
    }

    #[test]
    fn diff_encode_short_list() {
        assert_eq!(diff_encode(&[4, 6, 7], 0.03), vec![-1, 4, 2, 1, -2]);
    }

    #[test]
    fn diff_encode_empty_list_is_just_terminator() {
        assert_eq!(diff_encode(&[], 0.03), vec![-2]);
    }

    #[test]
    fn resync_markers_every_34_entries_at_3_percent() {
        assert_eq!(resync_period(0.03), 34);
        let indices: Vec<u32> = (0..100).map(|i| i * 3 + 1).collect();
        let stream = diff_encode(&indices, 0.03);
        let marker_positions: Vec<usize> = stream
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == RESYNC)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(marker_positions.len(), 3);
        // Markers precede list entries 0, 34 and 68.
        let absolutes: Vec<Symbol> = marker_positions.iter().map(|&p| stream[p + 1]).collect();
        assert_eq!(
            absolutes,
            vec![
                indices[0] as Symbol,
                indices[34] as Symbol,
                indices[68] as Symbol
            ]
        );
    }

    #[test]
    fn diff_decode_inverts_short_list() {
        let out = diff_decode(&[-1, 4, 2, 1, -2]);
        assert_eq!(out.indices, vec![4, 6, 7]);
        assert_eq!(out.dropped_symbols, 0);
        assert!(out.terminated);
    }

    #[test]
    fn diff_decode_empty_stream() {
        let out = diff_decode(&[-2]);
        assert!(out.indices.is_empty());
        assert!(out.terminated);
    }

    #[test]
    fn corruption_between_markers_is_contained() {
        let indices: Vec<u32> = (0..80).map(|i| i * 2).collect();
        let mut stream = diff_encode(&indices, 0.03);
        // Damage a stretch shortly after the first marker with implausible
        // symbols (zero is never a valid difference).
        for s in stream.iter_mut().skip(10).take(5) {
            *s = 0;
        }
        let out = diff_decode(&stream);
        assert!(out.dropped_symbols >= 5);
        assert!(out.truncated_runs >= 1);
        // Everything before the damage and from the second marker on is exact.
        let prefix: Vec<u32> = indices[..8].to_vec();
        assert_eq!(&out.indices[..8], &prefix[..]);
        let resumed: Vec<u32> = indices[34..].to_vec();
        assert!(out.indices.ends_with(&resumed));
        assert!(out.terminated);
    }

    #[test]
    fn missing_terminator_is_reported() {
        let out = diff_decode(&[-1, 4, 2]);
        assert_eq!(out.indices, vec![4, 6]);
        assert!(!out.terminated);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn partition_merge_round_trip(v in proptest::collection::vec(0u8..8, 0..400)) {
            let merged = merge_levels(&partition_levels(&v), v.len());
            prop_assert_eq!(merged.values, v);
            prop_assert!(merged.unknown.iter().all(|&u| !u));
        }

        #[test]
        fn diff_round_trip(
            raw in proptest::collection::btree_set(0u32..100_000, 0..300),
            rate in 0.005f64..1.0,
        ) {
            let indices: Vec<u32> = raw.into_iter().collect();
            let stream = diff_encode(&indices, rate);
            let out = diff_decode(&stream);
            prop_assert_eq!(out.indices, indices);
            prop_assert_eq!(out.dropped_symbols, 0);
            prop_assert!(out.terminated);
        }
    }

    #[test]
    fn sentinels_never_collide_with_data() {
        let indices: Vec<u32> = (0..500).map(|i| i * 7).collect();
        let stream = diff_encode(&indices, 0.03);
        let terminators = stream.iter().filter(|&&s| s == TERMINATOR).count();
        assert_eq!(terminators, 1);
        assert_eq!(*stream.last().unwrap(), TERMINATOR);
        for (i, &s) in stream.iter().enumerate() {
            if s == RESYNC {
                assert!(stream[i + 1] >= 0, "marker must be followed by an absolute");
            } else {
                assert!(s >= 0 || s == TERMINATOR, "unexpected negative data symbol");
            }
        }
    }
}
