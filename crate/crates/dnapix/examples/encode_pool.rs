//! Encode images into a DNA oligo pool.
//!
//! ```text
//! cargo run --release --example encode_pool [out_dir]
//! ```
//! Renders a demo poster, encodes it, and writes `pool.fasta`,
//! `manifest.json` and the quantized reference image.

use std::path::PathBuf;

use dnapix::encoder::{encode_images, EncodeParams};
use dnapix::fasta;
use dnapix::pixels::{dequantize_image, quantize_image};
use dnapix::ppm;
use dnapix::synth;

fn main() -> dnapix::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "dnapix-demo/encode".into()),
    );
    std::fs::create_dir_all(&out)?;

    let image = synth::poster(7, 192, 160);
    ppm::write_ppm_file(&out.join("original.ppm"), &image)?;

    let pool = encode_images(std::slice::from_ref(&image), &EncodeParams::default())?;
    fasta::write_fasta_file(&out.join("pool.fasta"), &pool.fasta_records())?;
    pool.manifest.save(&out.join("manifest.json"))?;
    let reference = dequantize_image(&quantize_image(&image))?;
    ppm::write_ppm_file(&out.join("quantized.ppm"), &reference)?;

    let s = &pool.stats;
    println!("encoded {}x{} image", image.width(), image.height());
    println!("  oligos:                {}", s.oligos);
    println!("  total nucleotides:     {}", s.total_nt);
    println!("  source bits (8-bit):   {}", s.source_bits);
    println!("  huffman bits:          {}", s.huffman_bits);
    println!("  source bits / nt:      {:.3}", s.source_bits_per_nt);
    println!(
        "  quantized bits / payload nt: {:.3} (raw constrained capacity 22/13 = 1.692)",
        s.quantized_bits_per_payload_nt
    );
    println!("first oligo: {}", String::from_utf8_lossy(&pool.records[0].seq));
    println!("artifacts in {}", out.display());
    Ok(())
}
