//! Output directory handling and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    /// Creates `root` if needed and checks that files can be created in it.
    pub fn prepare(root: &Path) -> Result<Self, CliError> {
        let unwritable = |source| CliError::Unwritable {
            path: root.to_path_buf(),
            source,
        };
        fs::create_dir_all(root).map_err(unwritable)?;
        let probe = root.join(".ecoopt-write-probe");
        fs::write(&probe, b"").map_err(unwritable)?;
        fs::remove_file(&probe).map_err(unwritable)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
        s.push('\n');
        self.write(name, s)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub files: Vec<String>,
    pub details: T,
}

impl<T: Serialize> Manifest<T> {
    pub fn new(command: &str, seed: u64, timestamp: bool, files: &[String], details: T) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            timestamp: timestamp.then(|| chrono::Utc::now().to_rfc3339()),
            files: files.to_vec(),
            details,
        }
    }
}
