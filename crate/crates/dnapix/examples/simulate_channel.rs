//! Push a pool through the synthesis/sequencing channel model.
//!
//! ```text
//! cargo run --release --example simulate_channel
//! ```
//! Drops oligos, injects substitutions, samples Poisson-coverage reads and
//! calls consensus, printing the damage ledger at each stage.

use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::sim::{consensus_pool, drop_oligos, generate_reads, substitute_symbols};
use dnapix::synth;

fn main() -> dnapix::Result<()> {
    let image = synth::poster(11, 160, 128);
    let pool = encode_images(&[image], &EncodeParams::default())?;
    println!("pool: {} oligos of 196 nt", pool.records.len());

    let seed = 42;
    let (after_drop, dropped) = drop_oligos(&pool.records, 10, seed)?;
    println!("dropout: removed {} oligos:", dropped.len());
    for id in &dropped {
        println!("  - {id}");
    }

    let (after_sub, changed) = substitute_symbols(&after_drop, 1e-3, seed)?;
    println!(
        "substitution: {changed} positions changed at rate 1e-3 \
         (expected ~{:.0})",
        after_drop.len() as f64 * 196.0 * 1e-3
    );

    let reads = generate_reads(&after_sub, 7.0, 0.01, seed)?;
    let total_reads = reads.total_reads();
    println!(
        "sequencing: {total_reads} reads at coverage 7 (mean {:.2} per oligo)",
        total_reads as f64 / after_sub.len() as f64
    );

    let (consensus, zero_read) = consensus_pool(&reads);
    let exact = consensus
        .iter()
        .filter(|rec| {
            after_sub
                .iter()
                .find(|r| r.id == rec.id)
                .is_some_and(|r| r.seq == rec.seq)
        })
        .count();
    println!(
        "consensus: {} called, {} bit-exact, {} lost to zero coverage",
        consensus.len(),
        exact,
        zero_read.len()
    );
    Ok(())
}
