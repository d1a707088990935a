//! File formats: diagnostics CSV, binary and CSV snapshots, run manifest.
//!
//! Snapshot layout, all little-endian:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 5     | magic `VLSV1`                             |
//! | 8     | rows (`u64`, one per velocity DoF)        |
//! | 8     | columns (`u64`, one per position DoF)     |
//! | 1     | layout (`0` dG nodes, `1` equidistant)    |
//! | 8·r·c | values, row-major `f64`                   |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use vlasov::grid::Layout;
use vlasov::prelude::*;

use crate::config::RunConfig;

pub const MAGIC: &[u8; 5] = b"VLSV1";

/// Column order of the diagnostics CSV.
pub const CSV_HEADER: [&str; 10] =
    ["t", "mass", "current", "kinetic", "electric", "total_energy", "entropy", "l1", "l2", "min_value"];

pub struct DiagnosticsWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Self {
            inner: csv::Writer::from_writer(BufWriter::new(file)),
        })
    }

    pub fn write(&mut self, r: &InvariantRecord) -> Result<()> {
        self.inner.serialize(r)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<InvariantRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        bail!("{}: unexpected header {}", path.display(), header.join(","));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<InvariantRecord>, _>>()
        .with_context(|| format!("malformed row in {}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub rows: usize,
    pub cols: usize,
    pub layout: Layout,
    pub values: Vec<f64>,
}

pub fn encode_snapshot(f: &DistributionField) -> Vec<u8> {
    let mut out = Vec::with_capacity(22 + 8 * f.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(f.n_rows() as u64).to_le_bytes());
    out.extend_from_slice(&(f.n_cols() as u64).to_le_bytes());
    out.push(f.layout().code());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < 22 || &bytes[..5] != MAGIC {
        bail!("not a VLSV1 snapshot");
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
    let (rows, cols) = (word(5), word(13));
    let layout = Layout::from_code(bytes[21]).with_context(|| format!("unknown layout code {}", bytes[21]))?;
    let body = &bytes[22..];
    if rows.checked_mul(cols).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        bail!("snapshot body has {} bytes, expected {rows} x {cols} doubles", body.len());
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(Snapshot { rows, cols, layout, values })
}

pub fn write_snapshot(path: &Path, f: &DistributionField) -> Result<()> {
    std::fs::write(path, encode_snapshot(f)).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut file| file.read_to_end(&mut bytes))
        .with_context(|| format!("cannot read {}", path.display()))?;
    decode_snapshot(&bytes).with_context(|| path.display().to_string())
}

/// Text fallback: one `x,v,f` line per degree of freedom.
pub fn write_snapshot_csv(path: &Path, f: &DistributionField) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["x", "v", "f"])?;
    let xs = f.grid().x_positions();
    for (j, v) in f.grid().v_positions().iter().enumerate() {
        for (x, value) in xs.iter().zip(f.row(j)) {
            w.serialize((x, v, value))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to trace an artifact back to its run.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub version: &'static str,
    pub threads: usize,
    pub dofs_x: usize,
    pub dofs_v: usize,
    pub background: f64,
    pub run: &'a RunConfig,
    pub scenario: &'a ScenarioConfig,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(file, "# vpsim run manifest")?;
    file.write_all(toml::to_string(manifest)?.as_bytes())?;
    Ok(())
}
