//! The run configuration file: TOML with one optional section per command.
//!
//! ```toml
//! cache_dir = "cache"
//! threads = 4
//!
//! [eval]          # EvalConfig fields
//! [ladder]        # LadderConfig fields
//! [quad]          # QuadConfig fields
//! [zeta_eval]     # t_lo, t_hi, step, output
//! [cache_build]   # t_max
//! [ladder_build]  # t_lo, t_hi, step, table
//! [verify]        # claim, T, U, n, l, F, regime, epsilon, grid, table, report, tsv, plot
//! ```
//!
//! Command-line flags win over the file. Relative paths in the file are taken
//! relative to the file itself.

use jacob_core::ladder::LadderConfig;
use jacob_core::{EvalConfig, QuadConfig};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub ladder: LadderConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub zeta_eval: ZetaEvalSection,
    #[serde(default)]
    pub cache_build: CacheBuildSection,
    #[serde(default)]
    pub ladder_build: LadderBuildSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaEvalSection {
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    pub step: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheBuildSection {
    pub t_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderBuildSection {
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    pub step: Option<f64>,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub claim: Option<String>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[serde(rename = "U")]
    pub u: Option<String>,
    pub n: Option<u32>,
    pub l: Option<u32>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    pub regime: Option<String>,
    pub epsilon: Option<f64>,
    /// a grid file, or `standard`
    pub grid: Option<String>,
    pub table: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub tsv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut cfg.cache_dir);
        fix(&mut cfg.zeta_eval.output);
        fix(&mut cfg.ladder_build.table);
        fix(&mut cfg.verify.table);
        fix(&mut cfg.verify.report);
        fix(&mut cfg.verify.tsv);
        fix(&mut cfg.verify.plot);
        if let Some(g) = &mut cfg.verify.grid {
            if g != "standard" && Path::new(g).is_relative() {
                *g = base.join(&*g).to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.eval.validate().map_err(|e| e.to_string())?;
        self.ladder.validate().map_err(|e| e.to_string())?;
        self.quad.validate().map_err(|e| e.to_string())?;
        if self.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(())
    }
}
