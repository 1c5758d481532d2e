//! FASTA and one-sequence-per-line serialization of oligo pools.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub id: String,
    pub seq: Vec<u8>,
}

/// Writes records as `>id` followed by the sequence on a single line.
pub fn write_fasta<W: Write>(w: &mut W, records: &[FastaRecord]) -> Result<()> {
    for rec in records {
        writeln!(w, ">{}", rec.id)?;
        w.write_all(&rec.seq)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads FASTA records; multi-line sequences are concatenated.
pub fn read_fasta<R: BufRead>(r: &mut R) -> Result<Vec<FastaRecord>> {
    let mut records = Vec::new();
    let mut current: Option<FastaRecord> = None;
    for line in r.lines() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(id) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                records.push(rec);
            }
            current = Some(FastaRecord {
                id: id.trim().to_string(),
                seq: Vec::new(),
            });
        } else {
            match current.as_mut() {
                Some(rec) => rec.seq.extend_from_slice(line.as_bytes()),
                None => return Err(Error::format("sequence data before any FASTA header")),
            }
        }
    }
    if let Some(rec) = current.take() {
        records.push(rec);
    }
    Ok(records)
}

pub fn write_fasta_file(path: &std::path::Path, records: &[FastaRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_fasta(&mut f, records)
}

pub fn read_fasta_file(path: &std::path::Path) -> Result<Vec<FastaRecord>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_fasta(&mut f)
}

/// Writes bare sequences, one per line, without identifiers.
pub fn write_seq_lines<W: Write>(w: &mut W, seqs: &[Vec<u8>]) -> Result<()> {
    for s in seqs {
        w.write_all(s)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_seq_lines<R: BufRead>(r: &mut R) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim_end();
        if !line.is_empty() {
            out.push(line.as_bytes().to_vec());
        }
    }
    Ok(out)
}
