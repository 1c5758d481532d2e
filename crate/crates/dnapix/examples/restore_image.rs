//! Repair a discolored decode with detection, inpainting and smoothing.
//!
//! ```text
//! cargo run --release --example restore_image [out_dir]
//! ```
//! Runs the missing-oligo scenario end to end and dumps every restoration
//! stage next to the corrupted input for visual comparison.

use std::path::PathBuf;

use dnapix::decoder::{decode_pool, DecodeParams};
use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::metrics::psnr;
use dnapix::pixels::{dequantize_image, quantize_image, PixelMask};
use dnapix::ppm;
use dnapix::restore::{restore, RestoreParams};
use dnapix::sim::drop_oligos;
use dnapix::synth;

fn main() -> dnapix::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "dnapix-demo/restore".into()),
    );
    std::fs::create_dir_all(&out)?;

    let image = synth::poster(29, 256, 200);
    let reference = dequantize_image(&quantize_image(&image))?;
    let pool = encode_images(&[image], &EncodeParams::default())?;
    let (damaged, _) = drop_oligos(&pool.records, 10, 7)?;
    let seqs: Vec<Vec<u8>> = damaged.iter().map(|r| r.seq.clone()).collect();
    let decoded = decode_pool(&seqs, &pool.manifest, &DecodeParams::default())?;
    let img = &decoded.images[0];

    let corrupted = dequantize_image(&img.channels)?;
    ppm::write_ppm_file(&out.join("corrupted.ppm"), &corrupted)?;
    println!(
        "decoded with {} unknown pixel slots",
        img.masks.iter().map(PixelMask::count).sum::<usize>()
    );

    let params = RestoreParams::default();
    let restored = restore(&img.channels, &img.masks, &params)?;
    ppm::write_ppm_file(&out.join("inpainted.ppm"), &restored.inpainted)?;
    ppm::write_ppm_file(&out.join("smoothed.ppm"), &restored.smoothed)?;
    ppm::write_ppm_file(&out.join("restored.ppm"), &restored.image)?;
    ppm::write_ppm_file(&out.join("reference.ppm"), &reference)?;

    let fmt = |v: Option<f64>| match v {
        Some(db) => format!("{db:.2} dB"),
        None => "identical".into(),
    };
    println!("PSNR vs quantized reference:");
    println!("  corrupted: {}", fmt(psnr(&corrupted, &reference)?));
    println!("  inpainted: {}", fmt(psnr(&restored.inpainted, &reference)?));
    println!("  smoothed:  {}", fmt(psnr(&restored.smoothed, &reference)?));
    println!("  restored:  {}", fmt(psnr(&restored.image, &reference)?));
    println!("stage dumps in {}", out.display());
    Ok(())
}
