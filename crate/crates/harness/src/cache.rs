//! Append-only JSON-lines record store.
//!
//! Each line is one [`ResultRecord`]. The fingerprint is the SHA-256 of the
//! canonical JSON of `{kind, inputs}`, with object keys sorted recursively.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub fingerprint: String,
    pub kind: String,
    pub payload: Value,
    pub version: String,
    pub timestamp: u64,
}

fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            Value::Object(keys.into_iter().map(|k| (k.clone(), canonical(&map[k]))).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn fingerprint(kind: &str, inputs: &Value) -> String {
    let text = canonical(&json!({ "inputs": inputs, "kind": kind })).to_string();
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: HashMap<String, Value>,
    /// Lines that failed to parse, by line number.
    corrupt: Vec<usize>,
    recheck: bool,
    pub hits: usize,
    pub misses: usize,
}

impl Cache {
    /// A cache that stores nothing.
    pub fn disabled() -> Self {
        Cache::default()
    }

    pub fn open(path: &Path, recheck: bool) -> Result<Self, Failure> {
        let mut cache = Cache {
            path: Some(path.to_path_buf()),
            recheck,
            ..Cache::default()
        };
        if !path.exists() {
            return Ok(cache);
        }
        let file = File::open(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<ResultRecord>(&line) {
                Ok(rec) => {
                    cache.entries.entry(rec.fingerprint).or_insert(rec.payload);
                }
                Err(_) => cache.corrupt.push(i + 1),
            }
        }
        Ok(cache)
    }

    pub fn rechecking(&self) -> bool {
        self.recheck
    }

    pub fn corrupt_lines(&self) -> &[usize] {
        &self.corrupt
    }

    pub fn get(&self, fp: &str) -> Option<&Value> {
        self.entries.get(fp)
    }

    fn append(&mut self, kind: &str, fp: String, payload: &Value) -> Result<(), Failure> {
        if let Some(path) = &self.path {
            let rec = ResultRecord {
                fingerprint: fp.clone(),
                kind: kind.to_string(),
                payload: payload.clone(),
                version: VERSION.to_string(),
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs()),
            };
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            writeln!(file, "{}", serde_json::to_string(&rec).expect("records serialize"))
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        }
        self.entries.insert(fp, payload.clone());
        Ok(())
    }

    /// Returns the stored payload, or computes and stores it. With recheck
    /// enabled a hit is recomputed and must match byte for byte.
    pub fn get_or_compute<F>(&mut self, kind: &str, inputs: &Value, compute: F) -> Result<Value, Failure>
    where
        F: FnOnce() -> Result<Value, Failure>,
    {
        let fp = fingerprint(kind, inputs);
        if let Some(stored) = self.entries.get(&fp).cloned() {
            self.hits += 1;
            if self.recheck {
                let fresh = compute()?;
                if fresh != stored {
                    return Err(Failure::Assertion(format!(
                        "cache determinism: {kind} {inputs} differs from the stored record"
                    )));
                }
            }
            return Ok(stored);
        }
        self.misses += 1;
        let payload = compute()?;
        self.append(kind, fp, &payload)?;
        Ok(payload)
    }

    /// Stores a payload computed elsewhere, or checks it against the stored
    /// record. Returns `false` on a mismatch.
    pub fn record_or_compare(&mut self, kind: &str, inputs: &Value, payload: &Value) -> Result<bool, Failure> {
        let fp = fingerprint(kind, inputs);
        match self.entries.get(&fp) {
            Some(stored) => {
                self.hits += 1;
                Ok(*stored == *payload)
            }
            None => {
                self.misses += 1;
                self.append(kind, fp, payload)?;
                Ok(true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"k":2,"n":5,"s":1}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"s":1,"n":5,"k":2}"#).unwrap();
        assert_eq!(fingerprint("m", &a), fingerprint("m", &b));
        assert_ne!(fingerprint("m", &a), fingerprint("fk", &a));
    }

    #[test]
    fn hits_do_not_recompute() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut cache = Cache::open(&path, false).unwrap();
        let inputs = json!({"x": 1});
        cache.get_or_compute("t", &inputs, || Ok(json!(5))).unwrap();
        let mut cache = Cache::open(&path, false).unwrap();
        let v = cache
            .get_or_compute("t", &inputs, || panic!("must not recompute"))
            .unwrap();
        assert_eq!(v, json!(5));
        assert_eq!(cache.hits, 1);
    }
}
