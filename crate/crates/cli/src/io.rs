//! Reading inputs and shaping JSON output.

use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use mchairs_core::word::{self, WordSystem};

/// Longest word whose letters are listed in JSON output.
pub const LETTER_PREVIEW: u64 = 10_000;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Every file read during a command, for the manifest.
#[derive(Default)]
pub struct Inputs {
    pub files: Vec<Value>,
}

impl Inputs {
    /// Read `path` (`-` is stdin) as text.
    pub fn read(&mut self, path: &str) -> Result<String> {
        let text = if path == "-" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .context("reading stdin")?;
            s
        } else {
            std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
        };
        self.files
            .push(json!({"path": path, "sha256": sha256_hex(text.as_bytes())}));
        Ok(text)
    }

    /// A word system from a word file, or from the JSON printed by a
    /// `construct` or `extend` command.
    pub fn system(&mut self, path: &str) -> Result<WordSystem> {
        let text = self.read(path)?;
        let src = if text.trim_start().starts_with('{') {
            let v: Value =
                serde_json::from_str(&text).with_context(|| format!("{path}: invalid JSON"))?;
            v.get("word_file")
                .and_then(Value::as_str)
                .ok_or_else(|| anyhow!("{path}: JSON input has no `word_file` field"))?
                .to_string()
        } else {
            text
        };
        word::parse(&src).map_err(|e| anyhow!("{path}: {e}"))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Name, alphabet, digest and per-word summary of a system.
pub fn describe(system: &WordSystem) -> Value {
    let full = system.full_words();
    let words: Vec<Value> = system
        .words()
        .iter()
        .zip(system.labels())
        .zip(full)
        .map(|((w, label), full)| {
            let letters = if w.len() <= &LETTER_PREVIEW.into() {
                w.materialize(LETTER_PREVIEW as usize).ok()
            } else {
                None
            };
            json!({
                "label": label,
                "length": w.len().to_string(),
                "full": full,
                "letters": letters,
            })
        })
        .collect();
    json!({
        "name": system.name(),
        "m": system.m(),
        "kind": system.kind(),
        "digest": system.digest(),
        "words": words,
    })
}

/// Comma-separated list of big integers.
pub fn parse_bigs(items: &[String]) -> Result<Vec<num_bigint::BigUint>> {
    items
        .iter()
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| anyhow!("`{s}` is not a nonnegative integer"))
        })
        .collect()
}
