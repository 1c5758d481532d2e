//! The whole pipeline at experiment scale: encode two posters into a
//! ~10,000-oligo pool, lose 10 oligos in the channel, decode, restore, and
//! report the quality numbers.
//!
//! ```text
//! cargo run --release --example end_to_end [out_dir]
//! ```

use std::path::PathBuf;

use dnapix::decoder::{decode_pool, DecodeParams};
use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::metrics::psnr;
use dnapix::pixels::{dequantize_image, quantize_image, PixelMask};
use dnapix::ppm;
use dnapix::restore::{restore, RestoreParams};
use dnapix::sim::{consensus_pool, drop_oligos, generate_reads};
use dnapix::synth;

fn main() -> dnapix::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "dnapix-demo/end_to_end".into()),
    );
    std::fs::create_dir_all(&out)?;

    let images = vec![synth::poster(601, 480, 400), synth::poster(602, 400, 360)];
    let pool = encode_images(&images, &EncodeParams::default())?;
    println!(
        "encoded {} images into {} oligos ({:.3} source bits per nt)",
        images.len(),
        pool.stats.oligos,
        pool.stats.source_bits_per_nt
    );

    // Channel: 10 missing oligos, then noisy reads collapsed by consensus.
    let seed = 2024;
    let (after_drop, dropped) = drop_oligos(&pool.records, 10, seed)?;
    let reads = generate_reads(&after_drop, 7.0, 0.01, seed)?;
    let (consensus, zero_read) = consensus_pool(&reads);
    println!(
        "channel: dropped {:?} plus {} zero-coverage oligos, {} consensus calls",
        dropped.len(),
        zero_read.len(),
        consensus.len()
    );

    let seqs: Vec<Vec<u8>> = consensus.iter().map(|r| r.seq.clone()).collect();
    let decoded = decode_pool(&seqs, &pool.manifest, &DecodeParams::default())?;
    println!(
        "decode: {} gaps, {} realignments ({} failed), {} addresses corrected",
        decoded.report.counts.total_gaps,
        decoded.report.counts.realign_successes,
        decoded.report.counts.realign_failures,
        decoded.report.counts.address_corrected,
    );

    for img in &decoded.images {
        let idx = img.index as usize;
        let reference = dequantize_image(&quantize_image(&images[idx]))?;
        let corrupted = dequantize_image(&img.channels)?;
        let masked: usize = img.masks.iter().map(PixelMask::count).sum();
        let restored = restore(&img.channels, &img.masks, &RestoreParams::default())?;

        let fmt = |v: Option<f64>| match v {
            Some(db) => format!("{db:.2} dB"),
            None => "identical".into(),
        };
        println!(
            "image {idx}: {masked} unknown slots, corrupted {}, restored {}",
            fmt(psnr(&corrupted, &reference)?),
            fmt(psnr(&restored.image, &reference)?),
        );
        ppm::write_ppm_file(&out.join(format!("img{idx}_corrupted.ppm")), &corrupted)?;
        ppm::write_ppm_file(&out.join(format!("img{idx}_restored.ppm")), &restored.image)?;
        ppm::write_ppm_file(&out.join(format!("img{idx}_reference.ppm")), &reference)?;
    }
    println!("images in {}", out.display());
    Ok(())
}
