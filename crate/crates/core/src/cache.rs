//! Content-addressed on-disk cache. Entries carry the hash of their payload and
//! are discarded when it no longer matches.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    sha256: String,
    payload: String,
}

pub fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Cache> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(Cache { dir })
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", sha256_hex(key)))
    }

    /// The payload stored under `key`, or `None` when absent or corrupted.
    pub fn get(&self, key: &str) -> Result<Option<String>> {
        let path = self.path(key);
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(None);
        };
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) if e.key == key && sha256_hex(&e.payload) == e.sha256 => Ok(Some(e.payload)),
            _ => {
                log::warn!("cache entry {} is corrupted; recomputing", path.display());
                let _ = fs::remove_file(&path);
                Ok(None)
            }
        }
    }

    pub fn put(&self, key: &str, payload: &str) -> Result<()> {
        let e = Entry {
            key: key.to_string(),
            sha256: sha256_hex(payload),
            payload: payload.to_string(),
        };
        let text = serde_json::to_string(&e).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = self.path(key).with_extension("tmp");
        fs::write(&tmp, text).map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, self.path(key)).map_err(|e| Error::Cache(e.to_string()))
    }
}
