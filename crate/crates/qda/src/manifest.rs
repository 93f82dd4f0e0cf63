use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timestamps {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

/// Everything needed to rerun a command; timestamps are informational only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub timestamps: Timestamps,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

impl RunManifest {
    pub fn start(command: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        let t = now_ms();
        Self {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamps: Timestamps { started_unix_ms: t, finished_unix_ms: t },
        }
    }

    pub fn finish(mut self) -> Self {
        self.timestamps.finished_unix_ms = now_ms();
        self
    }
}
