//! JSON artifacts: every command writes a single self-describing object
//! embedding the resolved configuration and a content hash of each input
//! file. Identical configuration and inputs produce byte-identical
//! artifacts: nothing time- or machine-dependent is recorded, and map
//! keys serialize in sorted order.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

use crate::Failure;

/// An input file together with the SHA-256 of its exact bytes.
pub struct HashedInput {
    pub label: String,
    pub path: String,
    pub sha256: String,
    pub bytes: Vec<u8>,
}

/// Reads and hashes one input file.
pub fn read_input(label: &str, path: &Path) -> Result<HashedInput, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex_digest(&bytes);
    Ok(HashedInput {
        label: label.to_string(),
        path: path.display().to_string(),
        sha256,
        bytes,
    })
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Assembles the artifact envelope.
pub fn envelope(command: &str, config: Value, inputs: &[HashedInput], report: Value) -> Value {
    let mut input_map = Map::new();
    for i in inputs {
        input_map.insert(
            i.label.clone(),
            json!({ "path": i.path, "sha256": i.sha256 }),
        );
    }
    json!({
        "tool": "fcone",
        "format_version": 1,
        "command": command,
        "config": config,
        "inputs": Value::Object(input_map),
        "report": report,
    })
}

/// Writes the artifact when a path was requested; the payload is pretty
/// JSON with a trailing newline.
pub fn write(out: Option<&Path>, artifact: &Value) -> Result<(), Failure> {
    if let Some(path) = out {
        let text = format!("{:#}\n", artifact);
        fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
