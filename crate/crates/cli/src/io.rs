//! Output formats: the binary/CSV matrix interchange format, CSV series
//! with an embedded meta line, and JSON reports with a meta block.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use censemble::CMat;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// 8-byte magic prefix of the binary matrix format.
pub const MATRIX_MAGIC: &[u8; 8] = b"CEMATRX1";

/// Little-endian complex-double binary matrix: magic, u64 rows, u64 cols,
/// then row-major (re, im) f64 pairs.
pub fn write_matrix_binary(path: &Path, m: &CMat) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()
}

/// CSV alternative: `i,j,re,im` rows with a header.
pub fn write_matrix_csv(path: &Path, m: &CMat) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "i,j,re,im")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(w, "{},{},{:e},{:e}", i, j, z.re, z.im)?;
        }
    }
    w.flush()
}

/// Meta block embedded in every output: schema version, tool version, the
/// full config that produced the file, the master seed and a content hash
/// of the config. Identical configs yield bit-identical outputs.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub version: u32,
    pub tool_version: &'static str,
    pub formula: String,
    pub master_seed: u64,
    pub config: serde_json::Value,
    pub config_sha256: String,
}

impl Meta {
    pub fn new(formula: impl Into<String>, master_seed: u64, config: serde_json::Value) -> Self {
        let canonical = serde_json::to_string(&config).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let config_sha256 = hex::encode(hasher.finalize());
        Self {
            version: 1,
            tool_version: env!("CARGO_PKG_VERSION"),
            formula: formula.into(),
            master_seed,
            config,
            config_sha256,
        }
    }
}

/// One output row of a time series.
pub struct SeriesRow {
    pub time: f64,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// CSV with `# meta: {...}` first, then `time,value[,stderr]`.
pub fn write_series_csv(path: &Path, meta: &Meta, rows: &[SeriesRow]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# meta: {}", serde_json::to_string(meta)?)?;
    let with_stderr = rows.iter().any(|r| r.stderr.is_some());
    if with_stderr {
        writeln!(w, "time,value,stderr")?;
        for r in rows {
            writeln!(w, "{:e},{:e},{:e}", r.time, r.value, r.stderr.unwrap_or(0.0))?;
        }
    } else {
        writeln!(w, "time,value")?;
        for r in rows {
            writeln!(w, "{:e},{:e}", r.time, r.value)?;
        }
    }
    w.flush()
}

/// JSON report: {"meta": ..., "data": ...}.
pub fn write_json_report<T: Serialize>(path: &Path, meta: &Meta, data: &T) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Report<'a, T> {
        meta: &'a Meta,
        data: &'a T,
    }
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &Report { meta, data })?;
    writeln!(w)?;
    w.flush()
}
