//! Provenance record written beside every output file.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub threads: usize,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new<F: Serialize>(
        subcommand: &str,
        flags: &F,
        seed: Option<u64>,
        wall_time_seconds: f64,
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            flags: serde_json::to_value(flags).unwrap_or(serde_json::Value::Null),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            wall_time_seconds,
        }
    }
}
