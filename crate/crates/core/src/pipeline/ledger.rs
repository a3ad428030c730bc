use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const LEDGER_FILE: &str = "run_ledger.json";

/// Incremental SHA-256 over labelled inputs.
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(stage: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"stage\0");
        h.update(stage.as_bytes());
        h.update(b"\0version\0");
        h.update(crate::VERSION.as_bytes());
        Self(h)
    }

    /// Adds a labelled, length-prefixed byte string.
    pub fn bytes(&mut self, label: &str, data: &[u8]) -> &mut Self {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((data.len() as u64).to_le_bytes());
        self.0.update(data);
        self
    }

    pub fn text(&mut self, label: &str, data: &str) -> &mut Self {
        self.bytes(label, data.as_bytes())
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub input_digest: String,
    /// Output file name -> SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
    pub tool_version: String,
    pub wall_time_ms: u64,
}

/// Per-stage record of what was consumed and produced in an output directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub stages: BTreeMap<String, StageEntry>,
}

impl RunLedger {
    /// The ledger in `dir`, or an empty one if absent or unreadable.
    pub fn load(dir: &Path) -> Self {
        std::fs::read(dir.join(LEDGER_FILE))
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .unwrap_or_default()
    }

    pub fn save(&self, dir: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("ledger serializes");
        text.push('\n');
        std::fs::write(dir.join(LEDGER_FILE), text)
    }

    /// True when `stage` last ran on the same inputs and its outputs are
    /// still on disk unchanged.
    pub fn is_fresh(&self, stage: &str, input_digest: &str, dir: &Path) -> bool {
        let Some(entry) = self.stages.get(stage) else {
            return false;
        };
        entry.input_digest == input_digest
            && entry.tool_version == crate::VERSION
            && entry.outputs.iter().all(|(name, digest)| {
                std::fs::read(dir.join(name)).is_ok_and(|b| sha256_hex(&b) == *digest)
            })
    }

    pub fn record(
        &mut self,
        stage: &str,
        input_digest: String,
        dir: &Path,
        outputs: &[&str],
        wall: Duration,
    ) -> std::io::Result<()> {
        let mut digests = BTreeMap::new();
        for name in outputs {
            digests.insert(name.to_string(), sha256_hex(&std::fs::read(dir.join(name))?));
        }
        self.stages.insert(
            stage.to_string(),
            StageEntry {
                input_digest,
                outputs: digests,
                tool_version: crate::VERSION.to_string(),
                wall_time_ms: wall.as_millis() as u64,
            },
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digest(parts: &[(&str, &str)]) -> String {
        let mut d = InputDigest::new("s");
        for (l, t) in parts {
            d.text(l, t);
        }
        d.finish()
    }

    #[test]
    fn digest_is_framed() {
        assert_ne!(digest(&[("a", "bc")]), digest(&[("ab", "c")]));
        assert_ne!(digest(&[("a", "b"), ("c", "")]), digest(&[("a", "bc")]));
        assert_eq!(digest(&[("a", "b")]), digest(&[("a", "b")]));
    }

    #[test]
    fn freshness() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("out.txt"), "x").unwrap();
        let mut l = RunLedger::default();
        assert!(!l.is_fresh("s", "d1", dir.path()));
        l.record("s", "d1".into(), dir.path(), &["out.txt"], Duration::ZERO).unwrap();
        l.save(dir.path()).unwrap();
        let l = RunLedger::load(dir.path());
        assert!(l.is_fresh("s", "d1", dir.path()));
        assert!(!l.is_fresh("s", "d2", dir.path()));
        std::fs::write(dir.path().join("out.txt"), "y").unwrap();
        assert!(!l.is_fresh("s", "d1", dir.path()));
        std::fs::remove_file(dir.path().join("out.txt")).unwrap();
        assert!(!l.is_fresh("s", "d1", dir.path()));
    }
}
