//! On-disk cache of null ensemble statistics.
//!
//! Each entry is one JSON file in the cache directory, named after its key.
//! Entries whose schema version or key do not match are ignored and
//! recomputed. Files are written to a temporary name and renamed, so a
//! crashed run never leaves a truncated entry behind.

use std::fs;
use std::path::{Path, PathBuf};

use corrscope_core::{NullConfig, NullEnsembleStats, NullKind, ReturnPanel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CACHE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineKey {
    pub n_assets: usize,
    pub window_len: usize,
    pub sims: usize,
    pub kind: String,
    pub master_seed: u64,
    /// Digest of the shuffled source returns; `None` for Gaussian nulls.
    pub source_digest: Option<String>,
}

impl BaselineKey {
    pub fn new(config: &NullConfig, source: Option<&ReturnPanel>) -> Self {
        let source_digest = match config.kind {
            NullKind::Gaussian => None,
            NullKind::Shuffled => source.map(returns_digest),
        };
        Self {
            n_assets: config.n_assets,
            window_len: config.window_len,
            sims: config.sims,
            kind: config.kind.as_str().to_owned(),
            master_seed: config.master_seed,
            source_digest,
        }
    }

    pub fn file_name(&self) -> String {
        let mut name = format!(
            "baseline-n{}-t{}-s{}-{}-seed{}",
            self.n_assets, self.window_len, self.sims, self.kind, self.master_seed
        );
        if let Some(d) = &self.source_digest {
            name.push('-');
            name.push_str(&d[..16]);
        }
        name.push_str(".json");
        name
    }
}

/// SHA-256 over the panel shape and the little-endian bits of every return.
pub fn returns_digest(panel: &ReturnPanel) -> String {
    let mut h = Sha256::new();
    h.update((panel.n_assets() as u64).to_le_bytes());
    h.update((panel.len() as u64).to_le_bytes());
    for x in panel.returns().as_slice() {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    schema_version: u32,
    key: BaselineKey,
    num_windows: usize,
    pr_mean: Vec<f64>,
    pr_std: Vec<f64>,
    scree_mean: Vec<f64>,
    abs_corr_p99: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BaselineCache {
    dir: PathBuf,
}

impl BaselineCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, key: &BaselineKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Cached statistics for `config`, if a valid entry exists.
    pub fn load(&self, config: &NullConfig, key: &BaselineKey) -> Option<NullEnsembleStats> {
        let text = fs::read(self.path_for(key)).ok()?;
        let e: Entry = serde_json::from_slice(&text).ok()?;
        let n = config.n_assets;
        let lens_ok = [&e.pr_mean, &e.pr_std, &e.scree_mean, &e.abs_corr_p99]
            .iter()
            .all(|v| v.len() == n);
        if e.schema_version != CACHE_SCHEMA_VERSION || &e.key != key || !lens_ok {
            return None;
        }
        Some(NullEnsembleStats {
            config: NullConfig {
                num_windows: e.num_windows,
                ..*config
            },
            pr_mean: e.pr_mean,
            pr_std: e.pr_std,
            scree_mean: e.scree_mean,
            abs_corr_p99: e.abs_corr_p99,
        })
    }

    pub fn store(&self, key: &BaselineKey, stats: &NullEnsembleStats) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let entry = Entry {
            schema_version: CACHE_SCHEMA_VERSION,
            key: key.clone(),
            num_windows: stats.config.num_windows,
            pr_mean: stats.pr_mean.clone(),
            pr_std: stats.pr_std.clone(),
            scree_mean: stats.scree_mean.clone(),
            abs_corr_p99: stats.abs_corr_p99.clone(),
        };
        let bytes = serde_json::to_vec_pretty(&entry).expect("cache entries are finite");
        let path = self.path_for(key);
        write_atomic(&path, &bytes)
    }
}

/// Writes through a sibling temporary file and a rename.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::io(path, e)
        })
}

pub(crate) fn tmp_path(path: &Path) -> PathBuf {
    let mut name = std::ffi::OsString::from(".");
    name.push(path.file_name().unwrap_or_default());
    name.push(".tmp");
    path.with_file_name(name)
}
