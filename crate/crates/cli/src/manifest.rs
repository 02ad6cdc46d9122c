use std::path::Path;

use serde::{Deserialize, Serialize};
use sgfb_core::io::KernelSpec;
use sgfb_core::LaplacianKind;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to regenerate an output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, excluding the program name.
    pub args: Vec<String>,
    pub graph_source: String,
    pub laplacian: LaplacianKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    pub seed: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")
    }
}
