//! Run manifests: a JSON sidecar per output file recording everything
//! needed to reproduce it byte for byte. Nothing time-dependent goes in,
//! so manifests themselves are reproducible.

use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Every resolved flag value of the run.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: "earlybias",
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand,
            seed: None,
            input: None,
            output: None,
            config,
        }
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest is serializable");
        text.push('\n');
        text
    }

    /// Sidecar path for an output file: `<output>.manifest.json`.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}
