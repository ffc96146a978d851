//! Run manifests written next to every output file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("qdarwin ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub tool_version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl RunManifest {
    /// Manifest stamped with `timestamp`, or the current UTC time.
    pub fn new(
        command: &str,
        parameters: BTreeMap<String, serde_json::Value>,
        seed: u64,
        timestamp: Option<&str>,
    ) -> Self {
        let timestamp = timestamp.map(str::to_string).unwrap_or_else(|| {
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        });
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: TOOL_VERSION.to_string(),
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        crate::formats::to_pretty(self)
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
