//! Run manifests: enough to re-execute a command and check inputs did not
//! change underneath it. Re-running a manifest reproduces byte-identical
//! primary outputs.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

/// FNV-1a over the file bytes; an integrity hint, not a cryptographic hash.
pub fn digest_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    Ok(format!("fnv1a:{h:016x}"))
}

pub struct ManifestBuilder {
    args: Vec<String>,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
}

impl ManifestBuilder {
    pub fn new(args: Vec<String>) -> Self {
        let seed = args
            .iter()
            .position(|a| a == "--seed")
            .and_then(|i| args.get(i + 1))
            .and_then(|s| s.parse().ok());
        ManifestBuilder { args, seed, inputs: BTreeMap::new() }
    }

    pub fn record_input(&mut self, path: &Path) -> std::io::Result<()> {
        self.inputs.insert(path.display().to_string(), digest_file(path)?);
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.args,
            "seed": self.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
        })
    }
}

/// The recorded argv of a manifest file, ready to re-dispatch.
pub fn command_of(manifest: &Value) -> Option<Vec<String>> {
    manifest
        .get("command")?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_owned))
        .collect()
}
