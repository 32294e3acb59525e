//! Content-addressed key-value cache backing the provider clients.
//!
//! Layout: `<root>/<provider>/<encoded-key>.json`, one file per key, value
//! stored as JSON. Writes go through a temp file and rename, so a key is
//! either absent or holds a complete value.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O under `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cache entry `{path}` is not valid JSON: {source}")]
    Corrupt { path: String, source: serde_json::Error },
}

/// Encodes an arbitrary key into a safe, reversible file stem: unreserved
/// characters pass through, everything else becomes `%XX`.
pub fn encode_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    for byte in key.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' => out.push(byte as char),
            _ => out.push_str(&format!("%{byte:02X}")),
        }
    }
    out
}

/// On-disk cache of provider responses, keyed by (provider name, query key).
#[derive(Debug, Clone)]
pub struct MetricsCache {
    root: PathBuf,
}

impl MetricsCache {
    pub fn new(root: impl Into<PathBuf>) -> MetricsCache {
        MetricsCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn entry_path(&self, provider: &str, key: &str) -> PathBuf {
        self.root.join(provider).join(format!("{}.json", encode_key(key)))
    }

    /// Returns the cached value for (provider, key), or `None` when absent.
    /// A corrupt entry is reported, not silently treated as a miss.
    pub fn get<T: DeserializeOwned>(&self, provider: &str, key: &str) -> Result<Option<T>, CacheError> {
        let path = self.entry_path(provider, key);
        let body = match fs::read_to_string(&path) {
            Ok(body) => body,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path: path.display().to_string(), source }),
        };
        serde_json::from_str(&body)
            .map(Some)
            .map_err(|source| CacheError::Corrupt { path: path.display().to_string(), source })
    }

    /// Stores a value atomically under (provider, key).
    pub fn put<T: Serialize>(&self, provider: &str, key: &str, value: &T) -> Result<(), CacheError> {
        let path = self.entry_path(provider, key);
        let dir = path.parent().expect("entry path has a parent");
        let io = |source: std::io::Error| CacheError::Io { path: path.display().to_string(), source };
        fs::create_dir_all(dir).map_err(io)?;
        let body = serde_json::to_string(value).expect("cache values serialize");
        let tmp = dir.join(format!(
            ".{}.tmp-{}",
            encode_key(key),
            std::process::id(),
        ));
        fs::write(&tmp, body).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(())
    }
}
