//! Content-addressed result cache: a digest over the full inputs (tables,
//! bounds, seed, tool version) keys a stored report, so replaying the same
//! inputs reproduces the same bytes without recomputation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub digest: String,
    pub command: String,
    pub seed: u64,
    pub tool_version: String,
    pub report: serde_json::Value,
    pub created_unix: u64,
}

/// Digest over a canonical JSON rendering of the inputs. Any change to the
/// tables, the property list, the bounds or the seed produces a new key.
pub fn input_digest(command: &str, canonical_inputs: &serde_json::Value, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(crate::TOOL_VERSION.as_bytes());
    h.update([0]);
    h.update(command.as_bytes());
    h.update([0]);
    h.update(canonical_inputs.to_string().as_bytes());
    h.update(seed.to_le_bytes());
    hex::encode(h.finalize())
}

pub struct Cache {
    dir: PathBuf,
    enabled: bool,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>, enabled: bool) -> Self {
        Cache { dir: dir.into(), enabled }
    }

    pub fn disabled() -> Self {
        Cache { dir: PathBuf::new(), enabled: false }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    /// Cache hit, or None; corrupt entries are ignored with a warning on
    /// stderr.
    pub fn get(&self, digest: &str) -> Option<RunRecord> {
        if !self.enabled {
            return None;
        }
        let path = self.path_for(digest);
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<RunRecord>(&text) {
            Ok(rec) if rec.digest == digest => Some(rec),
            _ => {
                eprintln!("warning: ignoring corrupt cache entry {}", path.display());
                None
            }
        }
    }

    pub fn put(&self, record: &RunRecord) -> std::io::Result<()> {
        if !self.enabled {
            return Ok(());
        }
        std::fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{}.tmp", record.digest));
        std::fs::write(&tmp, serde_json::to_string_pretty(record).unwrap())?;
        std::fs::rename(tmp, self.path_for(&record.digest))
    }

    pub fn record(
        &self,
        command: &str,
        canonical_inputs: &serde_json::Value,
        seed: u64,
        report: serde_json::Value,
    ) -> RunRecord {
        let digest = input_digest(command, canonical_inputs, seed);
        RunRecord {
            digest,
            command: command.to_string(),
            seed,
            tool_version: crate::TOOL_VERSION.to_string(),
            report,
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn entries(&self) -> Vec<String> {
        let Ok(rd) = std::fs::read_dir(&self.dir) else { return vec![] };
        let mut out: Vec<String> = rd
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().to_string_lossy().to_string();
                name.strip_suffix(".json").map(|s| s.to_string())
            })
            .collect();
        out.sort();
        out
    }

    pub fn clear(&self) -> std::io::Result<usize> {
        let mut removed = 0;
        if let Ok(rd) = std::fs::read_dir(&self.dir) {
            for e in rd.filter_map(|e| e.ok()) {
                if e.file_name().to_string_lossy().ends_with(".json") {
                    std::fs::remove_file(e.path())?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> PathBuf {
        let d = std::env::temp_dir().join(format!("skewpbw-cache-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn digest_changes_with_inputs_and_seed() {
        let v1 = serde_json::json!({"ring": "abc", "bounds": [2, 8, 2]});
        let v2 = serde_json::json!({"ring": "abc", "bounds": [3, 8, 2]});
        let d1 = input_digest("props", &v1, 0);
        assert_eq!(d1, input_digest("props", &v1, 0));
        assert_ne!(d1, input_digest("props", &v2, 0));
        assert_ne!(d1, input_digest("props", &v1, 1));
        assert_ne!(d1, input_digest("campaign", &v1, 0));
    }

    #[test]
    fn round_trip_and_corruption() {
        let cache = Cache::new(tmp(), true);
        let inputs = serde_json::json!({"x": 1});
        let rec = cache.record("props", &inputs, 7, serde_json::json!({"verdict": "holds"}));
        cache.put(&rec).unwrap();
        let hit = cache.get(&rec.digest).unwrap();
        assert_eq!(hit.report, rec.report);
        assert_eq!(cache.entries().len(), 1);
        // corrupt it
        std::fs::write(cache.dir().join(format!("{}.json", rec.digest)), "not json").unwrap();
        assert!(cache.get(&rec.digest).is_none());
        cache.clear().unwrap();
        assert!(cache.entries().is_empty());
        let _ = std::fs::remove_dir_all(cache.dir());
    }

    #[test]
    fn disabled_cache_is_inert() {
        let cache = Cache::disabled();
        let rec = cache.record("x", &serde_json::json!({}), 0, serde_json::json!({}));
        cache.put(&rec).unwrap();
        assert!(cache.get(&rec.digest).is_none());
    }
}
