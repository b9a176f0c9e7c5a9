//! Run manifest: configuration echo, diagnostics, and checksums of every
//! emitted data file, written last so a complete manifest implies a complete
//! run.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::emit::{self, EmitError, EmittedFile};

/// Per-run numerical diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct RunDiagnostics {
    /// Which sub-run of the scenario this row describes.
    pub label: String,
    pub kicks_applied: u64,
    pub norm_drift: f64,
    pub aliasing_flag: bool,
    /// Abort message when the run ended early on a numerical guard.
    pub aborted: Option<String>,
    /// Largest truncated force fraction of a hybrid run, if any.
    pub tail_force_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    Partial,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub code_version: &'static str,
    pub status: RunStatus,
    /// Present when the scenario aborted; outputs hold whatever was written.
    pub error: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub config: RunConfig,
    pub outputs: Vec<EmittedFile>,
    pub diagnostics: Vec<RunDiagnostics>,
}

fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn begin(config: RunConfig) -> Self {
        Self {
            code_version: env!("CARGO_PKG_VERSION"),
            status: RunStatus::Complete,
            error: None,
            started_unix: now_unix(),
            finished_unix: 0.0,
            config,
            outputs: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn push_output(&mut self, file: EmittedFile) {
        self.outputs.push(file);
    }

    pub fn push_diagnostics(&mut self, diagnostics: RunDiagnostics) {
        self.diagnostics.push(diagnostics);
    }

    pub fn mark_partial(&mut self, error: String) {
        self.status = RunStatus::Partial;
        self.error = Some(error);
    }

    /// Serializes and writes the manifest, then re-reads every listed output
    /// and verifies its checksum.
    pub fn finish(mut self, path: &Path) -> Result<RunManifest, EmitError> {
        self.finished_unix = now_unix();
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        emit::emit_text(&json, path)?;
        for output in &self.outputs {
            let on_disk = emit::checksum_on_disk(Path::new(&output.path))?;
            assert_eq!(
                on_disk, output.sha256,
                "checksum mismatch for {}",
                output.path
            );
        }
        Ok(self)
    }
}
