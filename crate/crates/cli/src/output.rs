//! Result rows, their CSV/JSON encodings, and atomic file output.
//!
//! Column order is fixed by the field order of [`SweepRow`] and
//! [`ScalarRow`]. JSON output is an object `{"schema": ..., "rows": [...]}`
//! whose rows carry the same keys as the CSV header, with `null` where the
//! CSV cell is empty.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const SWEEP_SCHEMA: &str = "ainsim-sweep/1";
pub const SCALAR_SCHEMA: &str = "ainsim-scalar/1";

/// One sweep grid point, or (with `snr_db` empty) a scenario's fit summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: String,
    pub m: usize,
    pub snr_db: Option<f64>,
    pub sum_rate_bits: Option<f64>,
    pub user1_rate: Option<f64>,
    pub user2_rate: Option<f64>,
    pub ser1: Option<f64>,
    pub ser2: Option<f64>,
    pub seed: u64,
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
}

impl SweepRow {
    pub fn is_summary(&self) -> bool {
        self.snr_db.is_none()
    }
}

/// One power point of the scalar scheme. `ser_i_j` and `rate_i_j` belong to
/// part `j` of user `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarRow {
    pub p_db: f64,
    pub q: u32,
    pub d_min: f64,
    pub ser_1_1: f64,
    pub ser_1_2: f64,
    pub ser_1_3: f64,
    pub ser_2_1: f64,
    pub ser_2_2: f64,
    pub ser_2_3: f64,
    pub rate_1_1: f64,
    pub rate_1_2: f64,
    pub rate_1_3: f64,
    pub rate_2_1: f64,
    pub rate_2_2: f64,
    pub rate_2_3: f64,
    pub sum_rate: f64,
    pub dof: f64,
    pub relay_ser: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct JsonDoc<'a, R> {
    schema: &'a str,
    rows: &'a [R],
}

pub fn encode<R: Serialize>(rows: &[R], schema: &str, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Json => {
            let doc = JsonDoc { schema, rows };
            let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Rows of a result file, recognized by header (CSV) or schema tag (JSON).
#[derive(Debug, Clone, PartialEq)]
pub enum ResultFile {
    Sweep(Vec<SweepRow>),
    Scalar(Vec<ScalarRow>),
}

pub fn decode(bytes: &[u8]) -> CliResult<ResultFile> {
    let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("unreadable result file: {e}"));
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'{') {
        let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| bad(&e))?;
        let schema = v.get("schema").and_then(|s| s.as_str()).unwrap_or_default().to_string();
        let rows = v.get("rows").cloned().unwrap_or_default();
        return match schema.as_str() {
            SWEEP_SCHEMA => Ok(ResultFile::Sweep(serde_json::from_value(rows).map_err(|e| bad(&e))?)),
            SCALAR_SCHEMA => Ok(ResultFile::Scalar(serde_json::from_value(rows).map_err(|e| bad(&e))?)),
            other => Err(bad(&format!("unknown schema '{other}'"))),
        };
    }
    let mut r = csv::Reader::from_reader(bytes);
    let headers = r.headers().map_err(|e| bad(&e))?.clone();
    match headers.get(0) {
        Some("scenario") => Ok(ResultFile::Sweep(
            r.deserialize().collect::<Result<_, _>>().map_err(|e| bad(&e))?,
        )),
        Some("p_db") => Ok(ResultFile::Scalar(
            r.deserialize().collect::<Result<_, _>>().map_err(|e| bad(&e))?,
        )),
        _ => Err(bad(&"unrecognized CSV header")),
    }
}

/// Where a command's result goes. Files are staged in a temporary file in
/// the target directory, which doubles as an up-front writability check,
/// and renamed into place only once the whole result is written.
pub enum Sink {
    Stdout,
    File { staged: NamedTempFile, target: PathBuf },
}

impl Sink {
    pub fn open(target: Option<&Path>) -> CliResult<Self> {
        let Some(target) = target else {
            return Ok(Sink::Stdout);
        };
        let dir = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        if target.is_dir() {
            return Err(CliError::Io(format!("{} is a directory", target.display())));
        }
        let staged = NamedTempFile::new_in(dir)
            .map_err(|e| CliError::Io(format!("cannot write to {}: {e}", target.display())))?;
        Ok(Sink::File {
            staged,
            target: target.to_path_buf(),
        })
    }

    pub fn commit(self, bytes: &[u8]) -> CliResult<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
            Sink::File { mut staged, target } => {
                staged.write_all(bytes)?;
                staged.as_file().sync_all()?;
                staged
                    .persist(&target)
                    .map_err(|e| CliError::Io(format!("cannot move result into {}: {}", target.display(), e.error)))?;
                Ok(())
            }
        }
    }
}
