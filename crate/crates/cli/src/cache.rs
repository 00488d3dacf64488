//! On-disk cache of finished reports, keyed by command, n and the
//! remaining arguments. Entries carry the code version that wrote them; an
//! entry from another version is refused rather than silently reused.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::Report;

pub const ENV_DIR: &str = "POINTRING_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    report: Report,
}

pub struct Cache {
    dir: PathBuf,
    refresh: bool,
}

impl Cache {
    pub fn new(dir: PathBuf, refresh: bool) -> Self {
        Cache { dir, refresh }
    }

    pub fn default_dir() -> PathBuf {
        std::env::var_os(ENV_DIR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".pointring-cache"))
    }

    fn path(&self, command: &str, n: Option<usize>, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let short: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        let n = n.map_or_else(|| "any".to_string(), |n| n.to_string());
        self.dir.join(format!("{command}-n{n}-{short}.json"))
    }

    /// Cached report, `None` on a miss. A stale entry is an error unless the
    /// cache was opened with `refresh`.
    pub fn load(&self, command: &str, n: Option<usize>, key: &str) -> Result<Option<Report>> {
        if self.refresh {
            return Ok(None);
        }
        let p = self.path(command, n, key);
        let Ok(text) = fs::read_to_string(&p) else { return Ok(None) };
        let e: Entry = serde_json::from_str(&text).with_context(|| format!("corrupt cache entry {}", p.display()))?;
        if e.version != pointring_core::CODE_VERSION {
            bail!(
                "stale cache entry {} (written by {}, this is {}); rerun with --refresh or clear the cache",
                p.display(),
                e.version,
                pointring_core::CODE_VERSION
            );
        }
        if e.key != key {
            return Ok(None);
        }
        Ok(Some(e.report))
    }

    pub fn store(&self, command: &str, n: Option<usize>, key: &str, report: &Report) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("cannot create {}", self.dir.display()))?;
        let e = Entry { version: pointring_core::CODE_VERSION.to_string(), key: key.to_string(), report: report.clone() };
        let p = self.path(command, n, key);
        let tmp = p.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&e)?)?;
        fs::rename(&tmp, &p)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_stale() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path().to_path_buf(), false);
        assert!(c.load("dims", Some(6), "k").unwrap().is_none());
        let r = Report::new("dims", Some(6), 0, serde_json::json!({"a": 1}));
        c.store("dims", Some(6), "k", &r).unwrap();
        let back = c.load("dims", Some(6), "k").unwrap().unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&r).unwrap());
        // rewrite with another version
        let p = c.path("dims", Some(6), "k");
        let text = fs::read_to_string(&p).unwrap().replace(pointring_core::CODE_VERSION, "0.0.0-old");
        fs::write(&p, text).unwrap();
        assert!(c.load("dims", Some(6), "k").is_err());
        let fresh = Cache::new(dir.path().to_path_buf(), true);
        assert!(fresh.load("dims", Some(6), "k").unwrap().is_none());
    }
}
