//! Report assembly, content hashing and artifact writing.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Invariant {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Invariant {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Invariant { name: name.into(), passed, detail: detail.into() }
    }
}

/// What a pipeline produced: the measured constants, its invariant checks and bulk tables.
#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub invariants: Vec<Invariant>,
    /// `(file name, CSV text)`, written only with `--output`.
    pub tables: Vec<(String, String)>,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
    pub input_hash: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invariants: Vec<Invariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
}

/// SHA-256 over a git blob header and the canonical config JSON, followed by any input file bytes.
pub fn input_hash(config: &ExperimentConfig, inputs: &[Vec<u8>]) -> String {
    let mut content = serde_json::to_vec(config).expect("config serializes");
    for bytes in inputs {
        content.push(b'\n');
        content.extend_from_slice(bytes);
    }
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(&content);
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn write_artifacts(dir: &Path, report_json: &str, tables: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report_json)?;
    for (name, text) in tables {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}
