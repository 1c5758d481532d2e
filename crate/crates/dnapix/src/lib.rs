//! dnapix stores quantized color images in synthetic-DNA oligo pools and
//! recovers them from damaged reads.
//!
//! The write path splits an image into RGB channels, quantizes each to 8
//! intensity levels, linearizes the planes along a generalized Hilbert scan,
//! splits the scan vector into per-level index lists, differential-encodes
//! those with periodic resync markers, Huffman-codes the result and maps the
//! bits to constraint-compliant 196-nt oligos (GC content 40-60% per block,
//! C/G homopolymer runs of at most 3). The read path reverses every step,
//! correcting addresses against the manifest, realigning Huffman streams
//! after missing oligos, and flagging unrecoverable pixels. A restoration
//! stage detects residual discolorations, inpaints masked regions by
//! diffusion and smooths with bilateral and adaptive median filters.
//!
//! See the `examples/` directory for one runnable program per capability,
//! or use the `dnapix` binary (`encode`, `simulate`, `decode`, `restore`,
//! `eval`, `run`).

pub mod bits;
pub mod cli;
pub mod constrained;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod fasta;
pub mod hilbert;
pub mod huffman;
pub mod levels;
pub mod manifest;
pub mod metrics;
pub mod oligo;
pub mod pixels;
pub mod ppm;
pub mod primers;
pub mod restore;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
