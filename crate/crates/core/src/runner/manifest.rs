//! Run manifest: configuration echo, timing, output checksums and
//! convergence flags.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::map::Quantity;
use crate::verify::VerifyReport;

use super::config::ScenarioConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    /// Data rows below the header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

/// A grid cell whose quadrature stopped at its budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceWarning {
    pub file: String,
    pub r: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: String,
    pub version: String,
    pub scenario: String,
    pub preset: String,
    pub config: ScenarioConfig,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputRecord>,
    pub all_converged: bool,
    pub convergence_warnings: Vec<ConvergenceWarning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSummary>,
}

impl RunManifest {
    pub fn new(
        cfg: &ScenarioConfig,
        outputs: Vec<OutputRecord>,
        convergence_warnings: Vec<ConvergenceWarning>,
        report: Option<&VerifyReport>,
        wall_time: Duration,
    ) -> Self {
        Self {
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: cfg.scenario.name().to_string(),
            preset: cfg.preset.clone(),
            config: cfg.clone(),
            wall_time_seconds: wall_time.as_secs_f64(),
            outputs,
            all_converged: convergence_warnings.is_empty(),
            convergence_warnings,
            verification: report.map(|r| VerificationSummary {
                passed: r.passed,
                failed: r.failed,
            }),
        }
    }
}

/// Lower-case hexadecimal SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Names of listed outputs in `dir` whose contents no longer match the
/// manifest checksum; missing files count as mismatches.
pub fn check_outputs(manifest: &RunManifest, dir: &Path) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for rec in &manifest.outputs {
        match fs::read(dir.join(&rec.file)) {
            Ok(bytes) if sha256_hex(&bytes) == rec.sha256 => {}
            Ok(_) => bad.push(rec.file.clone()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => bad.push(rec.file.clone()),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(bad)
}
