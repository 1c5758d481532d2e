//! Score an experiment: PSNR before/after restoration plus detection
//! precision/recall against ground truth.
//!
//! ```text
//! cargo run --release --example evaluate_metrics
//! ```

use dnapix::decoder::{decode_pool, DecodeParams};
use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::metrics::{corruption_truth, precision_recall, psnr, MetricsReport, OligoAccounting};
use dnapix::pixels::{dequantize_image, quantize_image};
use dnapix::restore::{restore, RestoreParams};
use dnapix::sim::drop_oligos;
use dnapix::synth;

fn main() -> dnapix::Result<()> {
    let image = synth::poster(33, 220, 180);
    let reference = dequantize_image(&quantize_image(&image))?;
    let pool = encode_images(std::slice::from_ref(&image), &EncodeParams::default())?;
    let (damaged, dropped) = drop_oligos(&pool.records, 8, 5)?;
    let seqs: Vec<Vec<u8>> = damaged.iter().map(|r| r.seq.clone()).collect();
    let decoded = decode_pool(&seqs, &pool.manifest, &DecodeParams::default())?;
    let img = &decoded.images[0];

    let corrupted = dequantize_image(&img.channels)?;
    let restored = restore(&img.channels, &img.masks, &RestoreParams::default())?;

    // Decoder masks double as the detection output to be scored.
    let truth = corruption_truth(&corrupted, &reference)?;
    let detection = precision_recall(&restored.combined, &truth);

    let counts = &decoded.report.counts;
    let total = pool.manifest.expected_oligos();
    let report = MetricsReport {
        psnr_corrupted_vs_quantized: psnr(&corrupted, &reference)?,
        psnr_restored_vs_quantized: psnr(&restored.image, &reference)?,
        psnr_corrupted_vs_original: psnr(&corrupted, &image)?,
        psnr_restored_vs_original: psnr(&restored.image, &image)?,
        psnr_quantized_vs_original: psnr(&reference, &image)?,
        detection: Some(detection),
        oligos: Some(OligoAccounting {
            total,
            clean: counts.unique_oligos_recovered - counts.oligos_with_corrections,
            erroneous: counts.oligos_with_corrections,
            missing: total - counts.unique_oligos_recovered,
            corrected: counts.address_corrected + counts.payload_blocks_corrected,
            discarded: counts.ambiguous_address_discarded,
        }),
        nucleotides_total: Some(total * 196),
        source_bits: Some(pool.stats.source_bits),
        bits_per_nt: Some(pool.stats.source_bits_per_nt),
        ..Default::default()
    };
    let accounting = report.oligos.as_ref().unwrap();
    assert!(accounting.consistent(), "total = clean + erroneous + missing");

    println!("dropped oligos: {}", dropped.len());
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
