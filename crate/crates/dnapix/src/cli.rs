//! Batch command surface: encode, simulate, decode, restore, eval, plus a
//! `run` command that executes a whole experiment from one config file.
//!
//! Every command is deterministic given its inputs and seed; reruns produce
//! byte-identical artifacts. Log verbosity follows `RUST_LOG`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::decoder::{decode_pool, DecodeParams, DecodeReport};
use crate::encoder::{encode_images, EncodeParams, PoolRecord};
use crate::error::{Error, Result};
use crate::fasta::{self, FastaRecord};
use crate::manifest::Manifest;
use crate::metrics::{
    corruption_truth, precision_recall, psnr, MetricsReport, OligoAccounting,
};
use crate::oligo::OligoId;
use crate::pixels::{
    dequantize_image, quantize_channel, quantize_image, split_channels, ColorTag, PixelMask,
    RgbImage,
};
use crate::ppm;
use crate::restore::{restore, RestoreParams};
use crate::sim::{
    consensus_pool, drop_oligos, generate_reads, substitute_symbols, DamageLog,
};

#[derive(Parser, Debug)]
#[command(
    name = "dnapix",
    version,
    about = "Store quantized images in synthetic-DNA oligo pools and restore them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode images into an oligo pool FASTA plus manifest.
    Encode(EncodeCmd),
    /// Damage a pool: dropout, substitutions, optional reads + consensus.
    Simulate(SimulateCmd),
    /// Decode a pool back to images and unknown-pixel masks.
    Decode(DecodeCmd),
    /// Repair a decoded image with detection, inpainting and smoothing.
    Restore(RestoreCmd),
    /// Score corrupted/restored images against references.
    Eval(EvalCmd),
    /// Run encode -> simulate -> decode -> restore -> eval from a config.
    Run(RunCmd),
}

#[derive(Args, Debug)]
pub struct EncodeCmd {
    /// Input images (PPM/PGM/PNG), at most 16.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::encoder::DEFAULT_RESYNC_RATE)]
    pub resync_rate: f64,
    #[arg(long, default_value_t = crate::encoder::DEFAULT_PRIMER_SEED)]
    pub primer_seed: u64,
}

#[derive(Args, Debug)]
pub struct SimulateCmd {
    /// Pool FASTA produced by `encode`.
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Whole oligos to remove.
    #[arg(long, default_value_t = 0)]
    pub drop: usize,
    /// Per-position substitution rate applied to the pool.
    #[arg(long, default_value_t = 0.0)]
    pub sub_rate: f64,
    /// Mean reads per oligo; enables read simulation + consensus.
    #[arg(long)]
    pub coverage: Option<f64>,
    /// Per-base read error rate (with --coverage).
    #[arg(long, default_value_t = 0.0)]
    pub read_err: f64,
    #[arg(long)]
    pub seed: u64,
    /// Also write the individual reads FASTA (can be large).
    #[arg(long, default_value_t = false)]
    pub write_reads: bool,
}

#[derive(Args, Debug)]
pub struct DecodeCmd {
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RestoreCmd {
    /// Decoded image PPM from `decode`.
    #[arg(long)]
    pub decoded: PathBuf,
    #[arg(long)]
    pub mask_r: Option<PathBuf>,
    #[arg(long)]
    pub mask_g: Option<PathBuf>,
    #[arg(long)]
    pub mask_b: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Least-frequent difference bins per channel pair.
    #[arg(long, default_value_t = RestoreParams::default().t)]
    pub t: usize,
    /// Sets both bilateral variances (sigma_d^2 and sigma_r^2).
    #[arg(long, default_value_t = 45.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 9)]
    pub window: usize,
    #[arg(long, default_value_t = RestoreParams::default().median_max_window)]
    pub median_window: usize,
    #[arg(long, default_value_t = 1)]
    pub median_passes: usize,
    /// Dump the inpainted and smoothed intermediates as PPM.
    #[arg(long, default_value_t = false)]
    pub dump_stages: bool,
}

#[derive(Args, Debug)]
pub struct EvalCmd {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub quantized: PathBuf,
    #[arg(long)]
    pub corrupted: PathBuf,
    #[arg(long)]
    pub restored: PathBuf,
    #[arg(long)]
    pub damage_log: Option<PathBuf>,
    #[arg(long)]
    pub decode_report: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Detection masks to score; without them detection is re-run on the
    /// corrupted image at --t.
    #[arg(long)]
    pub mask_r: Option<PathBuf>,
    #[arg(long)]
    pub mask_g: Option<PathBuf>,
    #[arg(long)]
    pub mask_b: Option<PathBuf>,
    #[arg(long, default_value_t = RestoreParams::default().t)]
    pub t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunCmd {
    #[arg(long)]
    pub config: PathBuf,
}

/// One experiment, serializable so runs are reproducible end to end.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    #[serde(default)]
    pub drop: usize,
    #[serde(default)]
    pub sub_rate: f64,
    #[serde(default)]
    pub coverage: Option<f64>,
    #[serde(default)]
    pub read_err: f64,
    #[serde(default = "default_resync")]
    pub resync_rate: f64,
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_resync() -> f64 {
    crate::encoder::DEFAULT_RESYNC_RATE
}
fn default_t() -> usize {
    RestoreParams::default().t
}
fn default_sigma() -> f64 {
    45.0
}
fn default_window() -> usize {
    9
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let data = std::fs::read_to_string(path)?;
        serde_json::from_str(&data).map_err(|e| Error::format(format!("config parse: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("config serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Encode(cmd) => cmd_encode(&cmd),
        Command::Simulate(cmd) => cmd_simulate(&cmd),
        Command::Decode(cmd) => cmd_decode(&cmd),
        Command::Restore(cmd) => cmd_restore(&cmd),
        Command::Eval(cmd) => cmd_eval(&cmd).map(|_| ()),
        Command::Run(cmd) => cmd_run(&cmd),
    }
}

fn cmd_encode(cmd: &EncodeCmd) -> Result<()> {
    std::fs::create_dir_all(&cmd.out)?;
    let mut images = Vec::with_capacity(cmd.inputs.len());
    for path in &cmd.inputs {
        images.push(ppm::read_image_file(path)?);
    }
    let params = EncodeParams {
        resync_rate: cmd.resync_rate,
        primer_seed: cmd.primer_seed,
    };
    let pool = encode_images(&images, &params)?;

    let mut manifest = pool.manifest.clone();
    for (entry, path) in manifest.images.iter_mut().zip(&cmd.inputs) {
        entry.source = Some(path.display().to_string());
    }
    manifest.save(&cmd.out.join("manifest.json"))?;
    fasta::write_fasta_file(&cmd.out.join("pool.fasta"), &pool.fasta_records())?;
    let mut txt = std::io::BufWriter::new(std::fs::File::create(cmd.out.join("pool.txt"))?);
    fasta::write_seq_lines(&mut txt, &pool.sequences())?;

    // Quantized references for later evaluation.
    for (i, image) in images.iter().enumerate() {
        let q = quantize_image(image);
        let reference = dequantize_image(&q)?;
        ppm::write_ppm_file(&cmd.out.join(format!("img{i}_quantized.ppm")), &reference)?;
    }

    log::info!("encoded {} images into {} oligos", images.len(), pool.stats.oligos);
    println!(
        "oligos: {}  total nt: {}  source bits: {}  bits/nt: {:.3}  quantized bits/payload nt: {:.3}",
        pool.stats.oligos,
        pool.stats.total_nt,
        pool.stats.source_bits,
        pool.stats.source_bits_per_nt,
        pool.stats.quantized_bits_per_payload_nt,
    );
    Ok(())
}

fn read_pool_with_ids(path: &Path) -> Result<Vec<PoolRecord>> {
    let records = fasta::read_fasta_file(path)?;
    records
        .into_iter()
        .map(|rec| {
            let id: OligoId = rec.id.parse()?;
            Ok(PoolRecord { id, seq: rec.seq })
        })
        .collect()
}

fn cmd_simulate(cmd: &SimulateCmd) -> Result<()> {
    std::fs::create_dir_all(&cmd.out)?;
    let pool = read_pool_with_ids(&cmd.pool)?;

    let (pool, dropped) = drop_oligos(&pool, cmd.drop, cmd.seed)?;
    let (pool, substituted) = substitute_symbols(&pool, cmd.sub_rate, cmd.seed)?;

    let mut log = DamageLog {
        seed: cmd.seed,
        dropped: dropped.iter().map(|id| id.to_string()).collect(),
        substituted_positions: substituted,
        zero_read_oligos: Vec::new(),
        coverage: cmd.coverage,
        per_base_error: cmd.coverage.map(|_| cmd.read_err),
        substitution_rate: cmd.sub_rate,
    };

    let output_pool = if let Some(coverage) = cmd.coverage {
        let reads = generate_reads(&pool, coverage, cmd.read_err, cmd.seed)?;
        if cmd.write_reads {
            let mut records = Vec::new();
            for group in &reads.groups {
                for (i, read) in group.reads.iter().enumerate() {
                    records.push(FastaRecord {
                        id: format!("{}_read{}", group.source, i),
                        seq: read.clone(),
                    });
                }
            }
            fasta::write_fasta_file(&cmd.out.join("reads.fasta"), &records)?;
        }
        let (consensus, missing) = consensus_pool(&reads);
        log.zero_read_oligos = missing.iter().map(|id| id.to_string()).collect();
        consensus
    } else {
        pool
    };

    let records: Vec<FastaRecord> = output_pool.iter().map(PoolRecord::to_fasta).collect();
    fasta::write_fasta_file(&cmd.out.join("consensus.fasta"), &records)?;
    log.save(&cmd.out.join("damage_log.json"))?;

    // Channel configuration, logged for the metrics pipeline.
    let config_text = format!(
        "drop = {}\nsub_rate = {}\ncoverage = {}\nread_err = {}\nseed = {}\n",
        cmd.drop,
        cmd.sub_rate,
        cmd.coverage.map_or("none".into(), |c| c.to_string()),
        cmd.read_err,
        cmd.seed
    );
    std::fs::write(cmd.out.join("channel_config.txt"), config_text)?;

    println!(
        "pool out: {} oligos  dropped: {}  substituted positions: {}  zero-read: {}",
        output_pool.len(),
        log.dropped.len(),
        log.substituted_positions,
        log.zero_read_oligos.len()
    );
    Ok(())
}

fn mask_to_image(mask: &PixelMask) -> RgbImage {
    let pixels = mask
        .flags()
        .iter()
        .map(|&f| if f { [255, 255, 255] } else { [0, 0, 0] })
        .collect();
    RgbImage::new(mask.width(), mask.height(), pixels).expect("mask dimensions are valid")
}

fn image_to_mask(image: &RgbImage) -> PixelMask {
    let flags = image.pixels().iter().map(|p| p[0] > 127).collect();
    PixelMask::new(image.width(), image.height(), flags).expect("image dimensions are valid")
}

fn cmd_decode(cmd: &DecodeCmd) -> Result<()> {
    std::fs::create_dir_all(&cmd.out)?;
    let manifest = Manifest::load(&cmd.manifest)?;
    let records = fasta::read_fasta_file(&cmd.pool)?;
    let seqs: Vec<Vec<u8>> = records.into_iter().map(|r| r.seq).collect();
    let out = decode_pool(&seqs, &manifest, &DecodeParams::default())?;

    for image in &out.images {
        let rgb = dequantize_image(&image.channels)?;
        let i = image.index;
        ppm::write_ppm_file(&cmd.out.join(format!("img{i}_decoded.ppm")), &rgb)?;
        for (mask, tag) in image.masks.iter().zip(["r", "g", "b"]) {
            ppm::write_ppm_file(
                &cmd.out.join(format!("img{i}_mask_{tag}.ppm")),
                &mask_to_image(mask),
            )?;
        }
    }
    out.report.save(&cmd.out.join("decode_report.json"))?;
    println!(
        "decoded {} images  gaps: {}  address corrections: {}  realign ok/fail: {}/{}",
        out.images.len(),
        out.report.counts.total_gaps,
        out.report.counts.address_corrected,
        out.report.counts.realign_successes,
        out.report.counts.realign_failures,
    );
    Ok(())
}

fn load_mask(path: &Option<PathBuf>, width: usize, height: usize) -> Result<PixelMask> {
    match path {
        Some(p) => {
            let img = ppm::read_ppm_file(p)?;
            if img.width() != width || img.height() != height {
                return Err(Error::invalid("mask dimensions differ from the image"));
            }
            Ok(image_to_mask(&img))
        }
        None => Ok(PixelMask::empty(width, height)),
    }
}

fn cmd_restore(cmd: &RestoreCmd) -> Result<()> {
    std::fs::create_dir_all(&cmd.out)?;
    let decoded = ppm::read_ppm_file(&cmd.decoded)?;
    let (w, h) = (decoded.width(), decoded.height());
    let masks = [
        load_mask(&cmd.mask_r, w, h)?,
        load_mask(&cmd.mask_g, w, h)?,
        load_mask(&cmd.mask_b, w, h)?,
    ];
    // The decoded PPM carries dequantized levels; re-quantization is exact.
    let [r, g, b] = split_channels(&decoded);
    let channels = [
        quantize_channel(&r, ColorTag::R),
        quantize_channel(&g, ColorTag::G),
        quantize_channel(&b, ColorTag::B),
    ];
    let params = RestoreParams {
        t: cmd.t,
        sigma_d2: cmd.sigma,
        sigma_r2: cmd.sigma,
        window: cmd.window,
        median_max_window: cmd.median_window,
        median_passes: cmd.median_passes,
        ..RestoreParams::default()
    };
    let restored = restore(&channels, &masks, &params)?;

    let stem = cmd
        .decoded
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image");
    ppm::write_ppm_file(&cmd.out.join(format!("{stem}_restored.ppm")), &restored.image)?;
    for (mask, tag) in restored.combined.iter().zip(["r", "g", "b"]) {
        ppm::write_ppm_file(
            &cmd.out.join(format!("{stem}_combined_mask_{tag}.ppm")),
            &mask_to_image(mask),
        )?;
    }
    if cmd.dump_stages {
        ppm::write_ppm_file(&cmd.out.join(format!("{stem}_inpainted.ppm")), &restored.inpainted)?;
        ppm::write_ppm_file(&cmd.out.join(format!("{stem}_smoothed.ppm")), &restored.smoothed)?;
    }
    println!(
        "restored {stem}: detected {} + decoder {} masked pixels",
        restored.detected.iter().map(PixelMask::count).sum::<usize>(),
        masks.iter().map(PixelMask::count).sum::<usize>(),
    );
    Ok(())
}

fn cmd_eval(cmd: &EvalCmd) -> Result<MetricsReport> {
    let original = ppm::read_image_file(&cmd.original)?;
    let quantized = ppm::read_ppm_file(&cmd.quantized)?;
    let corrupted = ppm::read_ppm_file(&cmd.corrupted)?;
    let restored = ppm::read_ppm_file(&cmd.restored)?;

    let mut report = MetricsReport {
        psnr_corrupted_vs_quantized: psnr(&corrupted, &quantized)?,
        psnr_restored_vs_quantized: psnr(&restored, &quantized)?,
        psnr_corrupted_vs_original: psnr(&corrupted, &original)?,
        psnr_restored_vs_original: psnr(&restored, &original)?,
        psnr_quantized_vs_original: psnr(&quantized, &original)?,
        ..Default::default()
    };
    for (name, value) in [
        ("corrupted_vs_quantized", report.psnr_corrupted_vs_quantized),
        ("restored_vs_quantized", report.psnr_restored_vs_quantized),
    ] {
        if value.is_none() {
            report.identical_pairs.push(name.to_string());
        }
    }

    // Detection quality against ground truth derived from the images; the
    // damage log gates whether there is anything to detect at all.
    let damage = match &cmd.damage_log {
        Some(path) => Some(DamageLog::load(path)?),
        None => None,
    };
    let has_damage = damage
        .as_ref()
        .is_some_and(|d| d.total_damage_events() > 0);
    if has_damage {
        let truth = corruption_truth(&corrupted, &quantized)?;
        let (w, h) = (corrupted.width(), corrupted.height());
        let masks = if cmd.mask_r.is_some() || cmd.mask_g.is_some() || cmd.mask_b.is_some() {
            [
                load_mask(&cmd.mask_r, w, h)?,
                load_mask(&cmd.mask_g, w, h)?,
                load_mask(&cmd.mask_b, w, h)?,
            ]
        } else {
            let [r, g, b] = split_channels(&corrupted);
            let channels = [
                quantize_channel(&r, ColorTag::R),
                quantize_channel(&g, ColorTag::G),
                quantize_channel(&b, ColorTag::B),
            ];
            crate::restore::detect_discoloration(&channels[0], &channels[1], &channels[2], cmd.t)?
        };
        report.detection = Some(precision_recall(&masks, &truth));
    }

    // Oligo accounting from the decode report and manifest, when provided.
    if let Some(path) = &cmd.decode_report {
        let decode_report = DecodeReport::load(path)?;
        let c = &decode_report.counts;
        let total = match &cmd.manifest {
            Some(m) => Manifest::load(m)?.expected_oligos(),
            None => decode_report.streams.iter().map(|s| s.blocks_expected as u64).sum(),
        };
        let recovered = c.unique_oligos_recovered;
        let erroneous = c.oligos_with_corrections;
        report.oligos = Some(OligoAccounting {
            total,
            clean: recovered - erroneous,
            erroneous,
            missing: total - recovered,
            corrected: c.address_corrected + c.payload_blocks_corrected,
            discarded: c.ambiguous_address_discarded,
        });
    }
    if let Some(path) = &cmd.manifest {
        let manifest = Manifest::load(path)?;
        let total_nt = manifest.expected_oligos() * crate::oligo::OLIGO_LEN as u64;
        report.nucleotides_total = Some(total_nt);
        let source_bits: u64 = manifest
            .images
            .iter()
            .map(|e| 8 * 3 * (e.width * e.height) as u64)
            .sum();
        report.source_bits = Some(source_bits);
        report.bits_per_nt = Some(source_bits as f64 / total_nt as f64);
    }

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::format(format!("metrics serialization: {e}")))?;
    match &cmd.out {
        Some(path) => std::fs::write(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = &cmd.out {
        println!("metrics written to {}", path.display());
    }
    Ok(report)
}

fn cmd_run(cmd: &RunCmd) -> Result<()> {
    let config = ExperimentConfig::load(&cmd.config)?;
    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;

    cmd_encode(&EncodeCmd {
        inputs: config.inputs.clone(),
        out: out.join("encoded"),
        resync_rate: config.resync_rate,
        primer_seed: crate::encoder::DEFAULT_PRIMER_SEED,
    })?;
    cmd_simulate(&SimulateCmd {
        pool: out.join("encoded/pool.fasta"),
        out: out.join("channel"),
        drop: config.drop,
        sub_rate: config.sub_rate,
        coverage: config.coverage,
        read_err: config.read_err,
        seed: config.seed,
        write_reads: false,
    })?;
    cmd_decode(&DecodeCmd {
        pool: out.join("channel/consensus.fasta"),
        manifest: out.join("encoded/manifest.json"),
        out: out.join("decoded"),
    })?;
    for i in 0..config.inputs.len() {
        cmd_restore(&RestoreCmd {
            decoded: out.join(format!("decoded/img{i}_decoded.ppm")),
            mask_r: Some(out.join(format!("decoded/img{i}_mask_r.ppm"))),
            mask_g: Some(out.join(format!("decoded/img{i}_mask_g.ppm"))),
            mask_b: Some(out.join(format!("decoded/img{i}_mask_b.ppm"))),
            out: out.join("restored"),
            t: config.t,
            sigma: config.sigma,
            window: config.window,
            median_window: RestoreParams::default().median_max_window,
            median_passes: 1,
            dump_stages: false,
        })?;
        cmd_eval(&EvalCmd {
            original: config.inputs[i].clone(),
            quantized: out.join(format!("encoded/img{i}_quantized.ppm")),
            corrupted: out.join(format!("decoded/img{i}_decoded.ppm")),
            restored: out.join(format!("restored/img{i}_decoded_restored.ppm")),
            damage_log: Some(out.join("channel/damage_log.json")),
            decode_report: Some(out.join("decoded/decode_report.json")),
            manifest: Some(out.join("encoded/manifest.json")),
            mask_r: None,
            mask_g: None,
            mask_b: None,
            t: config.t,
            out: Some(out.join(format!("metrics_img{i}.json"))),
        })?;
    }
    Ok(())
}
