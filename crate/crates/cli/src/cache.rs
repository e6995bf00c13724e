//! Content-addressed store for pure, expensive results.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dimred_core::quiver::{DimVector, Quiver};
use log::warn;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "DIMRED_CACHE";

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub created_at: u64,
    pub payload: Value,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(op: &str, quiver: &Quiver, gamma: &DimVector, q: u64, params: &str) -> String {
        let text = format!("{op}\n{}\n{gamma}\n{q}\n{params}", quiver.canonical_form());
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// `None` on a miss; corrupt entries are reported and treated as misses.
    pub fn get(&self, key: &str) -> Option<Value> {
        let path = self.path(key);
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(e) if e.key == key => Some(e.payload),
            _ => {
                warn!("corrupt cache entry {}, recomputing", path.display());
                None
            }
        }
    }

    /// Writes through a temporary file and renames it into place.
    pub fn put(&self, key: &str, payload: &Value) -> std::io::Result<()> {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let entry = CacheEntry {
            key: key.to_string(),
            created_at,
            payload: payload.clone(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn get_or_compute<T, E>(&self, key: &str, f: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(v) = self.get(key) {
            match serde_json::from_value(v) {
                Ok(t) => return Ok(t),
                Err(_) => warn!("cache entry {key} has the wrong shape, recomputing"),
            }
        }
        let t = f()?;
        match serde_json::to_value(&t) {
            Ok(v) => {
                if let Err(e) = self.put(key, &v) {
                    warn!("cannot write cache entry {key}: {e}");
                }
            }
            Err(e) => warn!("cannot serialize cache entry {key}: {e}"),
        }
        Ok(t)
    }
}

/// Applies `f` through the cache when one is configured.
pub fn cached<T, E>(
    cache: Option<&Cache>,
    key: impl FnOnce() -> String,
    f: impl FnOnce() -> Result<T, E>,
) -> Result<T, E>
where
    T: Serialize + DeserializeOwned,
{
    match cache {
        Some(c) => c.get_or_compute(&key(), f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        let k = Cache::key("count", &Quiver::a2(), &DimVector(vec![1, 1]), 3, "");
        assert!(c.get(&k).is_none());
        c.put(&k, &json!({"raw": 5})).unwrap();
        assert_eq!(c.get(&k), Some(json!({"raw": 5})));
        c.put(&k, &json!({"raw": 5})).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        let k = Cache::key("count", &Quiver::jordan(), &DimVector(vec![1]), 2, "");
        std::fs::write(c.path(&k), "{ not json").unwrap();
        assert!(c.get(&k).is_none());
        let v: u64 = c.get_or_compute(&k, || Ok::<_, ()>(4)).unwrap();
        assert_eq!(v, 4);
        let again: u64 = c.get_or_compute(&k, || Err(())).unwrap();
        assert_eq!(again, 4);
    }

    #[test]
    fn keys_ignore_arrow_order() {
        let a = Quiver::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Quiver::from_edges(3, &[(1, 2), (0, 1)]).unwrap();
        let g = DimVector(vec![1, 1, 1]);
        assert_eq!(
            Cache::key("x", &a, &g, 2, ""),
            Cache::key("x", &b, &g, 2, "")
        );
        assert_ne!(
            Cache::key("x", &a, &g, 2, ""),
            Cache::key("x", &a, &g, 3, "")
        );
        assert_ne!(
            Cache::key("x", &a, &g, 2, ""),
            Cache::key("y", &a, &g, 2, "")
        );
    }
}
