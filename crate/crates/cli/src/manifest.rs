//! `manifest.json` at the top of a cache directory: which signal settings
//! built the cache and which ladder settings built each table from it.

use jacob_core::ladder::{LadderConfig, LadderTable};
use jacob_core::EvalConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub eval_fingerprint: String,
    pub eval: EvalConfig,
    /// ladder fingerprint -> canonical config line
    pub ladder: BTreeMap<String, String>,
    /// table path -> provenance
    pub tables: BTreeMap<String, TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub ladder_fingerprint: String,
    pub eval_fingerprint: String,
    pub range: (f64, f64),
    pub points: usize,
}

impl Manifest {
    fn fresh(eval: &EvalConfig) -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            eval_fingerprint: eval.fingerprint(),
            eval: *eval,
            ladder: BTreeMap::new(),
            tables: BTreeMap::new(),
        }
    }

    fn path(dir: &Path) -> PathBuf {
        dir.join(MANIFEST_FILE)
    }

    /// Reads the manifest of `dir`, or starts one. Refuses a directory whose
    /// cache came from other signal settings.
    pub fn open(dir: &Path, eval: &EvalConfig) -> Result<Self, String> {
        let p = Self::path(dir);
        if !p.exists() {
            return Ok(Self::fresh(eval));
        }
        let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        if m.version != MANIFEST_VERSION {
            return Err(format!("{}: unsupported manifest version {}", p.display(), m.version));
        }
        if m.eval_fingerprint != eval.fingerprint() {
            return Err(format!(
                "mixed provenance: {} records eval fingerprint {} but this run uses {}",
                p.display(),
                m.eval_fingerprint,
                eval.fingerprint()
            ));
        }
        Ok(m)
    }

    pub fn note_ladder(&mut self, cfg: &LadderConfig) {
        self.ladder.insert(cfg.fingerprint(), cfg.canonical());
    }

    pub fn note_table(&mut self, path: &Path, table: &LadderTable) {
        self.note_ladder(&table.config);
        self.tables.insert(
            path.to_string_lossy().into_owned(),
            TableEntry {
                ladder_fingerprint: table.config.fingerprint(),
                eval_fingerprint: table.eval_fingerprint.clone(),
                range: table.range(),
                points: table.points.len(),
            },
        );
    }

    /// A table recorded under another ladder config than the one it carries
    /// was rewritten behind the manifest's back.
    pub fn check_table(&self, path: &Path, table: &LadderTable) -> Result<(), String> {
        if let Some(e) = self.tables.get(path.to_string_lossy().as_ref()) {
            if e.ladder_fingerprint != table.config.fingerprint() {
                return Err(format!(
                    "mixed provenance: manifest records ladder {} for {} but the file carries {}",
                    e.ladder_fingerprint,
                    path.display(),
                    table.config.fingerprint()
                ));
            }
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Result<(), String> {
        let p = Self::path(dir);
        let mut text = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        text.push('\n');
        std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn other_eval_settings_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let eval = EvalConfig::default();
        let mut m = Manifest::open(dir.path(), &eval).unwrap();
        m.note_ladder(&LadderConfig::default());
        m.save(dir.path()).unwrap();
        assert_eq!(Manifest::open(dir.path(), &eval).unwrap(), m);
        let other = EvalConfig { arg_step: 0.01, ..eval };
        let err = Manifest::open(dir.path(), &other).unwrap_err();
        assert!(err.contains("mixed provenance"), "{err}");
    }
}
