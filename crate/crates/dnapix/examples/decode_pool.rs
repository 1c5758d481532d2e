//! Decode a damaged pool and inspect the recovery report.
//!
//! ```text
//! cargo run --release --example decode_pool [out_dir]
//! ```
//! Encodes a poster, drops 10 oligos, decodes what is left, and writes the
//! discolored image plus its unknown-pixel masks.

use std::path::PathBuf;

use dnapix::decoder::{decode_pool, DecodeParams};
use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::pixels::{dequantize_image, PixelMask, RgbImage};
use dnapix::ppm;
use dnapix::sim::drop_oligos;
use dnapix::synth;

fn mask_image(mask: &PixelMask) -> RgbImage {
    let pixels = mask
        .flags()
        .iter()
        .map(|&f| if f { [255, 255, 255] } else { [0, 0, 0] })
        .collect();
    RgbImage::new(mask.width(), mask.height(), pixels).expect("mask is well formed")
}

fn main() -> dnapix::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "dnapix-demo/decode".into()),
    );
    std::fs::create_dir_all(&out)?;

    let image = synth::poster(13, 200, 160);
    let pool = encode_images(&[image], &EncodeParams::default())?;
    let (damaged, dropped) = drop_oligos(&pool.records, 10, 99)?;
    println!("dropped 10 of {} oligos", pool.records.len());

    let seqs: Vec<Vec<u8>> = damaged.iter().map(|r| r.seq.clone()).collect();
    let decoded = decode_pool(&seqs, &pool.manifest, &DecodeParams::default())?;
    let counts = &decoded.report.counts;
    println!(
        "gaps: {}  realign ok/fail: {}/{}  dropped symbols: {}",
        counts.total_gaps,
        counts.realign_successes,
        counts.realign_failures,
        decoded
            .report
            .streams
            .iter()
            .map(|s| s.dropped_symbols)
            .sum::<u64>()
    );

    let hit: Vec<String> = dropped.iter().map(|id| id.to_string()).collect();
    println!("damaged streams: {}", hit.join(", "));
    for s in &decoded.report.streams {
        if s.gaps > 0 {
            println!(
                "  stream {}{}: {} of {} blocks missing, {} indices recovered",
                s.color, s.level, s.gaps, s.blocks_expected, s.indices.len()
            );
        }
    }

    let img = &decoded.images[0];
    ppm::write_ppm_file(&out.join("decoded.ppm"), &dequantize_image(&img.channels)?)?;
    for (mask, tag) in img.masks.iter().zip(["r", "g", "b"]) {
        ppm::write_ppm_file(&out.join(format!("mask_{tag}.ppm")), &mask_image(mask))?;
    }
    let masked: usize = img.masks.iter().map(PixelMask::count).sum();
    println!("{masked} pixel slots marked unknown; artifacts in {}", out.display());
    Ok(())
}
