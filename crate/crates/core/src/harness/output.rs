//! Output files and their checksums.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Primary outputs of one run, written into a single directory.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self, HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Writes a primary output and records its digest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), HarnessError> {
        self.write_untracked(name, bytes)?;
        self.files.push(OutputFile {
            name: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Writes a file that does not enter the checksum.
    pub fn write_untracked(&self, name: &str, bytes: &[u8]) -> Result<(), HarnessError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), HarnessError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| HarnessError::Numerical(format!("csv encoding of {name}: {e}"));
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(&row).map_err(fail)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Numerical(format!("csv encoding of {name}: {e}")))?;
        self.write(name, &bytes)
    }

    pub fn json_lines<T: Serialize>(&mut self, name: &str, records: &[T]) -> Result<(), HarnessError> {
        let mut text = String::new();
        for r in records {
            let line = serde_json::to_string(r)
                .map_err(|e| HarnessError::Numerical(format!("json encoding of {name}: {e}")))?;
            text.push_str(&line);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    /// SHA-256 over the names and digests of the primary outputs, in order.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for f in &self.files {
            h.update(f.name.as_bytes());
            h.update([0u8]);
            h.update(f.sha256.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}
