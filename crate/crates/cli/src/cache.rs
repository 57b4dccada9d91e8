//! On-disk cache of step functions keyed by exact `p`, depth and value mode.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ruinlab::exactnum::BigRational;
use ruinlab::ruinrec::{Probability, RecError, StepFunction, StepRecord};
use ruinlab::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub record: StepRecord,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt cache entry {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("cache entry {path} has schema version {found}, expected {expected}")]
    Version { path: PathBuf, found: u64, expected: u32 },
    #[error("cache entry {path} fails validation: {source}")]
    Invalid { path: PathBuf, source: RecError },
    #[error("cache entry {path} holds a different key")]
    KeyMismatch { path: PathBuf },
}

pub fn cache_path<V: Probability>(dir: &Path, p: &BigRational, n: u32) -> PathBuf {
    let mode = match V::MODE {
        ruinlab::ruinrec::ValueMode::Exact => "exact",
        ruinlab::ruinrec::ValueMode::Double => "double",
    };
    dir.join(format!("step_p{}_{}_n{}_{}.json", p.numer(), p.denom(), n, mode))
}

/// Writes atomically: a temporary file in `dir` is renamed into place.
pub fn cache_store<V: Probability>(
    dir: &Path,
    p: &BigRational,
    n: u32,
    f: &StepFunction<V>,
) -> Result<PathBuf, CacheError> {
    std::fs::create_dir_all(dir)?;
    let entry = CacheEntry {
        schema_version: SCHEMA_VERSION,
        record: f.to_record(p, n),
    };
    let path = cache_path::<V>(dir, p, n);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer(&mut tmp, &entry).map_err(std::io::Error::from)?;
    tmp.flush()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

/// `Ok(None)` when no entry exists for the key.
pub fn cache_load<V: Probability>(
    dir: &Path,
    p: &BigRational,
    n: u32,
) -> Result<Option<StepFunction<V>>, CacheError> {
    let path = cache_path::<V>(dir, p, n);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    load_entry(&path, &text, p, n).map(Some)
}

fn load_entry<V: Probability>(
    path: &Path,
    text: &str,
    p: &BigRational,
    n: u32,
) -> Result<StepFunction<V>, CacheError> {
    let corrupt = |reason: String| CacheError::Corrupt {
        path: path.to_path_buf(),
        reason,
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| corrupt("missing schema_version".into()))?;
    if found != SCHEMA_VERSION as u64 {
        return Err(CacheError::Version {
            path: path.to_path_buf(),
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let entry: CacheEntry = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    let (p2, n2, f) = StepFunction::<V>::from_record(&entry.record).map_err(|source| CacheError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    if p2 != *p || n2 != n {
        return Err(CacheError::KeyMismatch {
            path: path.to_path_buf(),
        });
    }
    Ok(f)
}
