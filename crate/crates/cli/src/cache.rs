//! On-disk cache of computed polynomials.
//!
//! One JSON file per key, named by the SHA-256 of the key. Each entry stores
//! the key, the canonical JSON of the polynomial and the SHA-256 of that
//! JSON; entries whose key or digest does not match are ignored. Writes go
//! through a temporary file and an atomic rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hitchin_core::polyalg::RatPoly;
use hitchin_core::ENGINE_VERSION;

use crate::SCHEMA;

/// Environment variable overriding the default cache directory.
pub const CACHE_ENV: &str = "HITCHIN_COUNT_CACHE";

pub fn default_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    dirs::cache_dir().map(|d| d.join("hitchin-count"))
}

/// Canonical key of a polynomial family member.
pub fn key(family: &str, params: &[i64]) -> String {
    let parts: Vec<String> = params.iter().map(i64::to_string).collect();
    format!("{family}|{}|{ENGINE_VERSION}", parts.join("|"))
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Cache { dir: dir.as_ref().to_path_buf() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", digest(key)))
    }

    /// The cached polynomial for `key`, if present and intact.
    pub fn get(&self, key: &str) -> Option<RatPoly> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Value = serde_json::from_str(&text).ok()?;
        if entry.get("schema")?.as_str()? != SCHEMA || entry.get("key")?.as_str()? != key {
            return None;
        }
        let value = entry.get("value")?;
        if entry.get("hash")?.as_str()? != digest(&value.to_string()) {
            return None;
        }
        RatPoly::from_json(value).ok()
    }

    pub fn put(&self, key: &str, poly: &RatPoly) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let value = poly.to_json();
        let entry = json!({
            "schema": SCHEMA,
            "key": key,
            "value": value,
            "hash": digest(&value.to_string()),
        });
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(self.path(key)).context("moving cache entry into place")?;
        Ok(())
    }
}

/// Looks `key` up, computing and storing on a miss. With `verify`, a hit is
/// recomputed and must serialize byte-identically.
pub fn cached(
    cache: Option<&Cache>,
    verify: bool,
    key: &str,
    compute: impl FnOnce() -> hitchin_core::Result<RatPoly>,
) -> Result<RatPoly> {
    let Some(cache) = cache else { return Ok(compute()?) };
    match cache.get(key) {
        Some(hit) if verify => {
            let fresh = compute()?;
            if fresh.to_json() != hit.to_json() {
                return Err(hitchin_core::Error::InvariantViolation(format!(
                    "cache entry for {key} differs from recomputation"
                ))
                .into());
            }
            Ok(fresh)
        }
        Some(hit) => Ok(hit),
        None => {
            let fresh = compute()?;
            if let Err(e) = cache.put(key, &fresh) {
                eprintln!("warning: could not write cache entry: {e:#}");
            }
            Ok(fresh)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hitchin_core::universal::universal_h;

    #[test]
    fn round_trip_and_tamper_detection() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let p = universal_h(1, 2, 1).unwrap().poly;
        let k = key("universal", &[1, 2, 1]);
        assert!(cache.get(&k).is_none());
        cache.put(&k, &p).unwrap();
        assert_eq!(cache.get(&k).unwrap(), p);
        assert!(cache.get(&key("universal", &[1, 2, 2])).is_none());

        let path = cache.path(&k);
        let text = fs::read_to_string(&path).unwrap().replace("\"c\":\"1\"", "\"c\":\"2\"");
        fs::write(&path, text).unwrap();
        assert!(cache.get(&k).is_none());
    }

    #[test]
    fn verify_mode_detects_stale_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let k = key("universal", &[0, 1, 3]);
        let wrong = universal_h(0, 1, 2).unwrap().poly;
        cache.put(&k, &wrong).unwrap();
        let compute = || universal_h(0, 1, 3).map(|u| u.poly);
        assert_eq!(cached(Some(&cache), false, &k, compute).unwrap(), wrong);
        assert!(cached(Some(&cache), true, &k, compute).is_err());
    }
}
