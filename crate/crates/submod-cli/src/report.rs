//! The JSON run report printed on stdout: versioned schema, config echo,
//! payload, oracle-call count, and wall time. Replaying the echoed config
//! with the same seed reproduces the payload byte for byte; wall time is
//! the only field excluded from that contract.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub payload: serde_json::Value,
    pub oracle_calls: u64,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        payload: serde_json::Value,
        oracle_calls: u64,
        wall_time_ms: f64,
    ) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            seed,
            payload,
            oracle_calls,
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
