//! Run manifests: what was run, on which inputs, and where the result went.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub flags: Value,
    /// Input name → SHA-256 of its bytes.
    pub input_hashes: BTreeMap<String, String>,
    pub library_version: &'static str,
    pub wall_time_ms: u128,
    pub result_path: Option<String>,
    pub exit_code: u8,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
