//! On-disk cache of result sections, keyed by a digest of version, command,
//! input hashes and bounds.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

pub(crate) const ENV_VAR: &str = "FPAUT_CACHE";

pub(crate) struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `FPAUT_CACHE` takes precedence over `--cache-dir`; no directory means no cache.
    pub fn locate(flag: Option<&Path>) -> Option<Cache> {
        let env = std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from);
        env.or_else(|| flag.map(Path::to_path_buf)).map(|dir| Cache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn load(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &str, result: &Value) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_string(result)?)?;
        fs::rename(&tmp, self.path(key)).context("writing cache entry")?;
        Ok(())
    }
}
