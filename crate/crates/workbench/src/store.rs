//! One JSON file per run record, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha_core::training::RunRecord;

/// Records live under this subdirectory of an experiment's output dir.
pub const RECORDS_DIR: &str = "records";

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' { c } else { '-' })
        .collect()
}

/// File name of a record: instance, method, ansatz and seed.
pub fn record_file_name(rec: &RunRecord) -> String {
    format!(
        "{}__{}__{}__s{}.json",
        sanitize(&rec.instance),
        sanitize(&rec.method),
        sanitize(rec.ansatz.as_deref().unwrap_or("none")),
        rec.seed
    )
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("target path has no file name")?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("moving record into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn save_record(dir: &Path, rec: &RunRecord) -> Result<PathBuf> {
    let path = dir.join(record_file_name(rec));
    write_json(&path, rec)?;
    Ok(path)
}

pub fn load_record(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing record {}", path.display()))
}

/// Every `*.json` record in `dir`, sorted by file name.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_record(p)).collect()
}
