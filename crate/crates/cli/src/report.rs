use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable summary of one invocation.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub timing_ms: u64,
    /// Simplexes, cells and steps touched, keyed by name.
    pub counters: BTreeMap<String, u64>,
    /// PASS or FAIL for verify commands, with the first counterexample on FAIL.
    pub verdicts: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport { command, ..Default::default() }
    }

    pub fn count(&mut self, key: &str, value: usize) {
        self.counters.insert(key.to_string(), value as u64);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
