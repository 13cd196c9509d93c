//! State files and report files.
//!
//! A state file is UTF-8 JSON, schema version 1: local dimensions, the
//! density matrix as row-major `[real, imag]` pairs under the A-major
//! composite index (|i⟩_A⊗|j⟩_B at position i·dB + j), and optional
//! metadata. Files written by this tool round-trip byte-identically:
//! serde_json prints every f64 as its shortest exact representation, and
//! all fields serialize in a fixed order.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use entkit::tol::Tolerances;
use entkit::{BipartiteState, ComplexMatrix};

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub schema_version: u32,
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    /// Row-major dense matrix; each entry is [real, imag].
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl StateFile {
    pub fn from_state(state: &BipartiteState, metadata: Option<Metadata>) -> Self {
        let (da, db) = state.dims();
        let dim = da * db;
        let rho = state.rho();
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|k| {
                        let z = rho[(i, k)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            da,
            db,
            matrix,
            metadata,
        }
    }

    /// Validate and convert into a state, with field-level diagnostics.
    pub fn into_state(self, tols: &Tolerances) -> CliResult<BipartiteState> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.da == 0 || self.db == 0 {
            return Err(CliError::input("dA and dB must be positive"));
        }
        let dim = self.da * self.db;
        if self.matrix.len() != dim {
            return Err(CliError::input(format!(
                "matrix has {} rows, expected dA*dB = {dim}",
                self.matrix.len()
            )));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(CliError::input(format!(
                    "matrix row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (k, pair) in row.iter().enumerate() {
                if !pair[0].is_finite() || !pair[1].is_finite() {
                    return Err(CliError::input(format!(
                        "matrix entry ({i},{k}) is not finite"
                    )));
                }
                entries.push(Complex64::new(pair[0], pair[1]));
            }
        }
        let rho = ComplexMatrix::from_entries(dim, entries)
            .map_err(|e| CliError::input(e.to_string()))?;
        BipartiteState::new_with_tol(self.da, self.db, rho, tols)
            .map_err(|e| CliError::input(format!("state rejected: {e}")))
    }
}

/// Serialize a state file (pretty JSON, trailing newline).
pub fn render_state_file(file: &StateFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("state files always serialize");
    text.push('\n');
    text
}

pub fn save_state_file(path: &Path, file: &StateFile) -> CliResult<()> {
    fs::write(path, render_state_file(file))?;
    Ok(())
}

pub fn load_state_file(path: &Path) -> CliResult<StateFile> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_state_file(&bytes)
}

pub fn parse_state_file(bytes: &[u8]) -> CliResult<StateFile> {
    serde_json::from_slice(bytes).map_err(|e| {
        CliError::input(format!(
            "state file parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

/// SHA-256 of raw input bytes, hex-encoded; embedded in reports so a report
/// can be matched to its exact input.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Envelope for machine-readable command output: payload plus everything
/// needed to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_hash: Option<String>,
    pub report: T,
}

impl<T: Serialize> ReportFile<T> {
    pub fn new(command: &str, tolerances: Tolerances, report: T) -> Self {
        Self {
            tool: "entkit",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            tolerances,
            seed: None,
            input_hash: None,
            report,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_input_hash(mut self, hash: String) -> Self {
        self.input_hash = Some(hash);
        self
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report files always serialize");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}
