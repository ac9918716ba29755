use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// The noise variance behind a run: one value, or a description of how it
/// was drawn.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Sigma2 {
    Fixed(f64),
    Drawn(String),
}

/// Provenance block embedded in every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub sigma2_assumed: Sigma2,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, sigma2: f64) -> Self {
        Self::with_sigma2(command, seed, Sigma2::Fixed(sigma2))
    }

    pub fn with_sigma2(command: &str, seed: u64, sigma2: Sigma2) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            seed,
            tolerances: BTreeMap::new(),
            sigma2_assumed: sigma2,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn input(mut self, name: impl Into<String>) -> Self {
        self.inputs.push(name.into());
        self
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.into(), value);
        self
    }
}

#[derive(Serialize)]
pub struct Document<'a, R: Serialize> {
    pub manifest: &'a RunManifest,
    pub result: &'a R,
}

pub fn to_json<R: Serialize>(manifest: &RunManifest, result: &R) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(&Document { manifest, result })
        .map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Failed(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(content)
            .map_err(|e| CliError::Failed(e.to_string())),
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
