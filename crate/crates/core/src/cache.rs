//! Memoized `rc` values keyed by rank-normalized permutation, optionally
//! persisted as a JSON file.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::enumerate::{EnumerateError, Enumerator};
use crate::io::{format_perm, parse_perm};
use crate::model::PointConfig;

pub const CACHE_FILE: &str = "rc-cache.json";
/// Overrides the cache directory when no explicit one is given.
pub const CACHE_DIR_ENV: &str = "RECTANGULATIONS_CACHE_DIR";

#[derive(Debug, Default)]
pub struct RcCache {
    map: Mutex<HashMap<Vec<usize>, u64>>,
}

impl RcCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `rc` of the canonical configuration of `perm` (the empty permutation has 1).
    pub fn rc(&self, perm: &[usize], enumerator: &Enumerator) -> Result<u64, EnumerateError> {
        if let Some(&v) = self.map.lock().expect("cache lock").get(perm) {
            return Ok(v);
        }
        let config = if perm.is_empty() {
            PointConfig::empty()
        } else {
            PointConfig::from_perm(perm).expect("cache keys are permutations")
        };
        let v = enumerator.count(&config)?;
        self.map.lock().expect("cache lock").insert(perm.to_vec(), v);
        Ok(v)
    }

    /// Stores a value computed elsewhere, e.g. from a materialized set.
    pub fn record(&self, perm: &[usize], rc: u64) {
        self.map.lock().expect("cache lock").insert(perm.to_vec(), rc);
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads `dir/rc-cache.json` if it exists.
    pub fn load(dir: &Path) -> io::Result<Self> {
        let path = dir.join(CACHE_FILE);
        let cache = Self::new();
        if !path.exists() {
            return Ok(cache);
        }
        let text = fs::read_to_string(&path)?;
        let stored: BTreeMap<String, u64> =
            serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        {
            let mut map = cache.map.lock().expect("cache lock");
            for (k, v) in stored {
                let perm = parse_perm(&k).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
                map.insert(perm, v);
            }
        }
        Ok(cache)
    }

    pub fn save(&self, dir: &Path) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let stored: BTreeMap<String, u64> =
            self.map.lock().expect("cache lock").iter().map(|(k, &v)| (format_perm(k), v)).collect();
        let path = dir.join(CACHE_FILE);
        fs::write(&path, serde_json::to_string_pretty(&stored).expect("serializable"))?;
        Ok(path)
    }
}
