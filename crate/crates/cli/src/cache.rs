//! On-disk orbit cache: one JSON-lines file per (morphism, start point).

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use zsigmondy_core::geometry::OrbitCache;
use zsigmondy_core::sequences::{SequenceSpec, TermStream};
use zsigmondy_core::{Error, Result};

pub const CACHE_ENV: &str = "ZSIGMONDY_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".zcache";

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

/// File name for an orbit: sha256 of the morphism components and start.
pub fn orbit_file(dir: &Path, orbit: &OrbitCache) -> PathBuf {
    let key = serde_json::json!({
        "morphism": orbit.morphism().component_strings(),
        "start": orbit.start().coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    let digest = Sha256::digest(key.to_string().as_bytes());
    dir.join(format!("{}.jsonl", hex::encode(digest)))
}

/// A term stream whose orbit is backed by the cache directory, if any.
pub struct CachedStream {
    pub stream: TermStream,
    file: Option<PathBuf>,
}

impl CachedStream {
    pub fn open(spec: SequenceSpec, digit_ceiling: u64, dir: Option<&Path>) -> Result<Self> {
        let Some((morphism, start)) = spec.dynamics() else {
            return Ok(CachedStream { stream: TermStream::with_digit_ceiling(spec, digit_ceiling)?, file: None });
        };
        let orbit = OrbitCache::new(morphism.clone(), start)?.with_digit_ceiling(digit_ceiling);
        let file = match dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
                let file = orbit_file(dir, &orbit);
                orbit.sync_file(&file)?;
                Some(file)
            }
            None => None,
        };
        Ok(CachedStream { stream: TermStream::with_orbit(spec, orbit)?, file })
    }

    /// Appends newly computed orbit points to the cache file.
    pub fn save(&self) -> Result<()> {
        if let (Some(file), Some(orbit)) = (&self.file, self.stream.orbit()) {
            orbit.sync_file(file)?;
        }
        Ok(())
    }
}
