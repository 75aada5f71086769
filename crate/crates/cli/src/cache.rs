//! Append-only result cache.
//!
//! One entry per line: `checksum \t version \t key \t value`, where the checksum
//! is the SHA-256 of the remaining three fields joined by tabs. Lines that fail
//! the checksum are ignored, so a torn or corrupted write only costs a
//! recomputation. The last valid line for a key wins.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "ZSDEFORM_CACHE_DIR";
const FILE_NAME: &str = "cache.tsv";

pub struct Cache {
    path: PathBuf,
    version: String,
}

fn checksum(payload: &str) -> String {
    Sha256::digest(payload.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Cache {
    /// Cache in the directory named by the environment, if set.
    pub fn from_env() -> Option<Self> {
        let dir = std::env::var_os(CACHE_ENV)?;
        Some(Self::open(Path::new(&dir), ENGINE_VERSION))
    }

    pub fn open(dir: &Path, version: &str) -> Self {
        Cache {
            path: dir.join(FILE_NAME),
            version: version.to_string(),
        }
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(&self.path).ok()?;
        let mut found = None;
        for line in text.lines() {
            let Some((sum, payload)) = line.split_once('\t') else {
                continue;
            };
            if checksum(payload) != sum {
                continue;
            }
            let mut fields = payload.splitn(3, '\t');
            let (Some(v), Some(k), Some(value)) = (fields.next(), fields.next(), fields.next()) else {
                continue;
            };
            if v == self.version && k == key {
                found = Some(value.to_string());
            }
        }
        found
    }

    /// Appends an entry with a single write so concurrent writers never interleave within a line.
    pub fn put(&self, key: &str, value: &str) -> Result<()> {
        anyhow::ensure!(
            !key.contains(['\t', '\n']) && !value.contains(['\t', '\n']),
            "cache fields may not contain tabs or newlines"
        );
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let payload = format!("{}\t{}\t{}", self.version, key, value);
        let line = format!("{}\t{}\n", checksum(&payload), payload);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("opening {}", self.path.display()))?;
        f.write_all(line.as_bytes())?;
        Ok(())
    }

    /// Returns the cached value, or computes, stores and returns it.
    /// A failed store is not an error: the cache is only an optimization.
    pub fn get_or_insert(
        cache: Option<&Self>,
        key: &str,
        compute: impl FnOnce() -> Result<String>,
    ) -> Result<String> {
        if let Some(v) = cache.and_then(|c| c.get(key)) {
            return Ok(v);
        }
        let v = compute()?;
        if let Some(c) = cache {
            let _ = c.put(key, &v);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_version() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path(), "1");
        assert_eq!(c.get("a"), None);
        c.put("a", "5/4").unwrap();
        assert_eq!(c.get("a").as_deref(), Some("5/4"));
        assert_eq!(Cache::open(dir.path(), "2").get("a"), None);
    }

    #[test]
    fn corrupt_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path(), "1");
        c.put("a", "1/2").unwrap();
        let p = dir.path().join(FILE_NAME);
        let text = fs::read_to_string(&p).unwrap().replace("1/2", "1/3");
        fs::write(&p, text + "garbage\n").unwrap();
        assert_eq!(c.get("a"), None);
        c.put("a", "1/2").unwrap();
        assert_eq!(c.get("a").as_deref(), Some("1/2"));
    }

    #[test]
    fn rejects_separators() {
        let dir = tempfile::tempdir().unwrap();
        assert!(Cache::open(dir.path(), "1").put("a\tb", "x").is_err());
    }
}
