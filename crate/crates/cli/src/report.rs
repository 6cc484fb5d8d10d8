//! JSON report files.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use rip_lab_core::Seed;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce a run plus its results. `results` holds
/// no timing data, so re-running a command yields an identical section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    pub command: String,
    pub seed: Option<Seed>,
    pub params: Value,
    pub results: Value,
    pub wall_time_ns: u64,
}

impl ReportFile {
    pub fn new(command: &str, seed: Option<Seed>, params: Value, results: Value) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            seed,
            params,
            results,
            wall_time_ns: 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}
