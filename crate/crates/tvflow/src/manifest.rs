//! Run manifests: everything needed to reproduce a CLI run byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::degrade::DegradationSpec;
use crate::error::Result;
use crate::flow::FlowConfig;

/// Record of one CLI run. A manifest fully determines the outputs: feeding
/// it back through `tvflow rerun` reproduces the image and metrics bytes
/// exactly (wall-clock and iteration counts are informational).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Which pipeline produced this: `"evolve"` or `"degrade"`.
    pub command: String,
    pub input: String,
    pub output: String,
    /// Metrics CSV path (evolve runs only).
    pub metrics: Option<String>,
    pub flow: Option<FlowConfig>,
    pub degrade: Option<DegradationSpec>,
    /// Spatial-step override applied after loading the input.
    pub h_override: Option<f64>,
    /// Iterations actually taken (evolve runs only).
    pub iterations: Option<usize>,
    /// Informational; not reproduced by reruns.
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}
