//! Design the 8 level-selecting primer pairs and verify their properties.
//!
//! ```text
//! cargo run --release --example design_primers [seed]
//! ```

use dnapix::primers::{design_primers, wallace_tm};

fn main() -> dnapix::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x0d9a_517e);
    let set = design_primers(seed)?;

    println!("primer set for seed {seed:#x}:");
    for (level, pair) in set.pairs().iter().enumerate() {
        println!(
            "  level {level}: fwd {}  rev {}  Tm {} C / {} C",
            String::from_utf8_lossy(pair.forward()),
            String::from_utf8_lossy(pair.reverse()),
            wallace_tm(pair.forward()),
            wallace_tm(pair.reverse()),
        );
    }
    println!(
        "minimum pairwise Hamming distance over all 16 primers: {}",
        set.min_pairwise_distance()
    );
    Ok(())
}
