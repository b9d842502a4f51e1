//! Content-addressed storage of Fock tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use precut_core::FockTable;
use sha2::{Digest, Sha256};

pub struct TableKey<'a> {
    pub instance: &'a str,
    pub palette: usize,
    pub delta: u8,
    pub mu: u8,
    pub n: usize,
    pub forced: bool,
}

impl TableKey<'_> {
    pub fn digest(&self) -> String {
        let text = format!(
            "{}|palette={}|delta={}|mu={}|N={}|forced={}|v{}",
            self.instance,
            self.palette,
            self.delta,
            self.mu,
            self.n,
            self.forced,
            env!("CARGO_PKG_VERSION")
        );
        let hash = Sha256::digest(text.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn cache_dir() -> PathBuf {
    match std::env::var_os("PRECUT_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("precut-cache"),
    }
}

pub fn load(dir: &Path, key: &TableKey) -> Result<Option<FockTable>> {
    let path = dir.join(format!("{}.json", key.digest()));
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok(Some(FockTable::from_json(&value)?))
}

pub fn store(dir: &Path, key: &TableKey, table: &FockTable) -> Result<PathBuf> {
    let path = dir.join(format!("{}.json", key.digest()));
    write_atomic(&path, table.to_json_string().as_bytes())?;
    Ok(path)
}

/// Write to a temporary file next to `path`, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
