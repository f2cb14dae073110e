use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{Adapter, AdapterError, AdapterKind, CascadeError};

/// Environment variable naming the adapter cache directory.
pub const CACHE_DIR_ENV: &str = "UNITFORGE_CACHE_DIR";

/// Content-addressed store of adapter outputs.
///
/// Entries live at `<dir>/<first two hex chars>/<sha256 hex>`, keyed by the adapter kind,
/// its endpoint and the input. Writes go to a temporary file in the same directory and are
/// renamed into place, so concurrent writers and interrupted runs never leave torn entries.
#[derive(Debug, Clone)]
pub struct ContentCache {
    dir: PathBuf,
}

impl ContentCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The cache named by `UNITFORGE_CACHE_DIR`, if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(|v| Self::new(PathBuf::from(v)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(kind: AdapterKind, endpoint: &str, input: &str) -> String {
        let mut h = Sha256::new();
        h.update(kind.as_str().as_bytes());
        h.update([0u8]);
        h.update(endpoint.as_bytes());
        h.update([0u8]);
        h.update(input.as_bytes());
        hex::encode(h.finalize())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(key)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        std::fs::read_to_string(self.path_for(key)).ok()
    }

    pub fn put(&self, key: &str, value: &str) -> Result<(), CascadeError> {
        let path = self.path_for(key);
        let parent = path.parent().expect("cache entries have a parent");
        let io = |source| CascadeError::Io {
            path: path.clone(),
            source,
        };
        std::fs::create_dir_all(parent).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(io)?;
        tmp.write_all(value.as_bytes()).map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

/// Wraps an adapter so that successful outputs are memoized in a [`ContentCache`].
/// Failures are never cached.
pub struct CachedAdapter {
    inner: Box<dyn Adapter>,
    cache: ContentCache,
}

impl CachedAdapter {
    pub fn new(inner: Box<dyn Adapter>, cache: ContentCache) -> Self {
        Self { inner, cache }
    }
}

impl Adapter for CachedAdapter {
    fn kind(&self) -> AdapterKind {
        self.inner.kind()
    }

    fn name(&self) -> &str {
        self.inner.name()
    }

    fn endpoint(&self) -> &str {
        self.inner.endpoint()
    }

    fn invoke_batch(&self, inputs: &[String]) -> Vec<Result<String, AdapterError>> {
        let keys: Vec<String> = inputs
            .iter()
            .map(|s| ContentCache::key(self.kind(), self.endpoint(), s))
            .collect();
        let mut out: Vec<Option<Result<String, AdapterError>>> =
            keys.iter().map(|k| self.cache.get(k).map(Ok)).collect();
        let missing: Vec<usize> = (0..inputs.len()).filter(|&i| out[i].is_none()).collect();
        if !missing.is_empty() {
            let batch: Vec<String> = missing.iter().map(|&i| inputs[i].clone()).collect();
            let fresh = self.inner.invoke_batch(&batch);
            for (&i, r) in missing.iter().zip(fresh) {
                if let Ok(v) = &r {
                    if let Err(e) = self.cache.put(&keys[i], v) {
                        log::warn!("adapter cache write failed: {e}");
                    }
                }
                out[i] = Some(r);
            }
        }
        out.into_iter()
            .map(|r| r.unwrap_or(Err(AdapterError::Misaligned {
                expected: inputs.len(),
                got: 0,
            })))
            .collect()
    }
}
