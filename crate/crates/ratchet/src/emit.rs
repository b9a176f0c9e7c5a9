//! Data-file emission: CSV writers with fixed schemas, 17-significant-digit
//! floats, and SHA-256 checksums of the bytes written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ratchet_core::observables::{MomentumLine, QuasienergyDistribution, TimeSeries};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Checksum and size of one emitted file.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EmittedFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

fn fmt(x: f64) -> String {
    // 17 significant digits round-trip f64 exactly
    format!("{x:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<EmittedFile, EmitError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| EmitError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    let mut file = fs::File::create(path).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(content.as_bytes())
        .map_err(|source| EmitError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    let digest = hasher.finalize();
    Ok(EmittedFile {
        path: path.to_string_lossy().into_owned(),
        sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        bytes: content.len() as u64,
    })
}

/// `t, p_mean, p2_mean, otoc_var, otoc_trans_re, otoc_trans_im, autocorr_re, autocorr_im`
pub fn emit_series(series: &TimeSeries<f64>, path: &Path) -> Result<EmittedFile, EmitError> {
    let mut out = String::with_capacity(series.len() * 160 + 96);
    out.push_str("t,p_mean,p2_mean,otoc_var,otoc_trans_re,otoc_trans_im,autocorr_re,autocorr_im\n");
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            series.time[i],
            fmt(series.p_mean[i]),
            fmt(series.p2_mean[i]),
            fmt(series.otoc_var[i]),
            fmt(series.otoc_trans[i].re),
            fmt(series.otoc_trans[i].im),
            fmt(series.autocorr[i].re),
            fmt(series.autocorr[i].im),
        ));
    }
    write_file(path, &out)
}

/// `n, p, prob`
pub fn emit_distribution(
    distribution: &[MomentumLine<f64>],
    path: &Path,
) -> Result<EmittedFile, EmitError> {
    let mut out = String::with_capacity(distribution.len() * 48 + 16);
    out.push_str("n,p,prob\n");
    for line in distribution {
        out.push_str(&format!(
            "{},{},{}\n",
            line.index,
            fmt(line.momentum),
            fmt(line.probability)
        ));
    }
    write_file(path, &out)
}

/// `epsilon, density`
pub fn emit_spectrum(
    spectrum: &QuasienergyDistribution<f64>,
    path: &Path,
) -> Result<EmittedFile, EmitError> {
    let mut out = String::with_capacity(spectrum.density.len() * 44 + 20);
    out.push_str("epsilon,density\n");
    for (eps, d) in spectrum.epsilon.iter().zip(&spectrum.density) {
        out.push_str(&format!("{},{}\n", fmt(*eps), fmt(*d)));
    }
    write_file(path, &out)
}

/// `theta, p`
pub fn emit_portrait(points: &[(f64, f64)], path: &Path) -> Result<EmittedFile, EmitError> {
    let mut out = String::with_capacity(points.len() * 44 + 10);
    out.push_str("theta,p\n");
    for (theta, p) in points {
        out.push_str(&format!("{},{}\n", fmt(*theta), fmt(*p)));
    }
    write_file(path, &out)
}

/// Generic table emission for scenario summaries: a header line and rows of
/// formatted floats.
pub fn emit_table(
    header: &str,
    rows: &[Vec<f64>],
    path: &Path,
) -> Result<EmittedFile, EmitError> {
    let mut out = String::with_capacity(rows.len() * 24 * 4 + header.len() + 8);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| fmt(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Writes raw text (the manifest) and returns its checksum entry.
pub fn emit_text(content: &str, path: &Path) -> Result<EmittedFile, EmitError> {
    write_file(path, content)
}

/// Recomputes a file's checksum from disk; used to validate the manifest.
pub fn checksum_on_disk(path: &Path) -> Result<String, EmitError> {
    let bytes = fs::read(path).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}
