use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use aspstruct::{parse_program, Program};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Input {
    pub text: String,
    pub digest: String,
}

pub fn read_input(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    Ok(Input { text, digest })
}

pub fn read_program(path: &Path) -> Result<(Program, String)> {
    let input = read_input(path)?;
    let p = parse_program(&input.text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((p, input.digest))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Collects results and per-stage timings of one command.
pub struct Report {
    digest: Option<String>,
    results: serde_json::Map<String, Value>,
    timings: BTreeMap<String, f64>,
    clock: Instant,
}

impl Report {
    pub fn new(digest: Option<String>) -> Self {
        Report { digest, results: serde_json::Map::new(), timings: BTreeMap::new(), clock: Instant::now() }
    }

    /// Records `value` under `key` along with the time since the previous record.
    pub fn put(&mut self, key: &str, value: Value) {
        self.timings.insert(key.to_string(), self.clock.elapsed().as_secs_f64());
        self.clock = Instant::now();
        self.results.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": std::env::args().collect::<Vec<_>>(),
            "input_digest": self.digest,
            "results": self.results,
            "timings": self.timings,
        })
    }

    pub fn pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn names(p: &Program, ids: impl IntoIterator<Item = usize>) -> Vec<String> {
    ids.into_iter().map(|a| p.name(a).to_string()).collect()
}

/// Worker count from `ASPSTRUCT_THREADS`; `None` leaves the rayon default.
pub fn threads() -> Option<usize> {
    std::env::var("ASPSTRUCT_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0)
}
