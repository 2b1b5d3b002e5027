//! Content-addressed artifact cache and atomic file output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// SHA-256 of the canonical JSON form of `fragment`: object keys sorted,
/// shortest round-trip floats, no whitespace.
pub fn cache_key<S: Serialize>(fragment: &S) -> String {
    let value = serde_json::to_value(fragment).expect("fragment serializes");
    let text = serde_json::to_string(&value).expect("value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Everything a command produced: artifact bytes by file name and the summary line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub summary: String,
    pub files: BTreeMap<String, String>,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Entry> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        match serde_json::from_str(&text) {
            Ok(e) => Some(e),
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {key}: {e}");
                None
            }
        }
    }

    /// Concurrent writers of one key race on the final rename, so readers
    /// only ever see a complete entry.
    pub fn put(&self, key: &str, entry: &Entry) -> io::Result<()> {
        write_atomic(&self.path(key), serde_json::to_string(entry)?.as_bytes())
    }
}
