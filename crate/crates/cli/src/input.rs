//! Loading configurations and assignments from files, scenarios and JSONL.

use crate::fail::{Failure, Outcome};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use sympconfig::configspec::{ConfigJson, ConfigSpec};
use sympconfig::enumerate::Assignment;
use sympconfig::scenarios::builtin_scenario;

/// A configuration, optionally with one assignment, and where it came from.
pub struct Loaded {
    pub spec: ConfigSpec,
    pub assignment: Option<Assignment>,
    /// Path or `scenario:<name>`.
    pub source: String,
    /// Raw bytes that define the input, for hashing.
    pub bytes: Vec<u8>,
}

#[derive(Deserialize)]
struct Wrapped {
    config: ConfigJson,
    #[serde(default)]
    vectors: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct Flat {
    #[serde(flatten)]
    config: ConfigJson,
    #[serde(default)]
    vectors: Option<Vec<String>>,
}

fn parse_vectors(v: &[String], n: usize) -> Outcome<Assignment> {
    let refs: Vec<&str> = v.iter().map(String::as_str).collect();
    Assignment::parse(&refs, n).map_err(|e| Failure::config(format!("bad vector: {e}")))
}

/// Accepts a bare configuration (`N`, `components`, `intersections`, `star`)
/// with an optional `vectors` list, or the fixture layout with the
/// configuration under `config`.
pub fn load_config_file(path: &Path) -> Outcome<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let (config, vectors) = if value.get("config").is_some() {
        let w: Wrapped = serde_json::from_value(value).map_err(|e| Failure::config(e.to_string()))?;
        (w.config, w.vectors)
    } else {
        let f: Flat = serde_json::from_value(value).map_err(|e| Failure::config(e.to_string()))?;
        (f.config, f.vectors)
    };
    let spec = ConfigSpec::from_json_value(config).map_err(|e| Failure::config(e.to_string()))?;
    let assignment = vectors.map(|v| parse_vectors(&v, spec.ambient_n)).transpose()?;
    Ok(Loaded { spec, assignment, source: path.display().to_string(), bytes })
}

pub fn load_scenario(name: &str) -> Outcome<Loaded> {
    let s = builtin_scenario(name).map_err(|e| Failure::usage(e.to_string()))?;
    let mut bytes = s.spec.to_json().into_bytes();
    if let Some(a) = &s.assignment {
        for v in &a.vectors {
            bytes.push(b'\n');
            bytes.extend(v.to_string().bytes());
        }
    }
    Ok(Loaded { spec: s.spec, assignment: s.assignment, source: format!("scenario:{name}"), bytes })
}

pub fn load(config: Option<&PathBuf>, scenario: Option<&str>) -> Outcome<Loaded> {
    match (config, scenario) {
        (Some(p), None) => load_config_file(p),
        (None, Some(s)) => load_scenario(s),
        (Some(_), Some(_)) => Err(Failure::usage("give either --config or --scenario, not both")),
        (None, None) => Err(Failure::usage("one of --config or --scenario is required")),
    }
}

impl Loaded {
    pub fn require_assignment(&self) -> Outcome<&Assignment> {
        self.assignment
            .as_ref()
            .ok_or_else(|| Failure::config(format!("{} has no `vectors` list", self.source)))
    }
}

#[derive(Deserialize)]
struct Record {
    vectors: Vec<String>,
}

/// Reads the `vectors` field of every line of an enumerate output file.
pub fn read_assignments(path: &Path, n: usize) -> Outcome<Vec<Assignment>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: Record =
            serde_json::from_str(line).map_err(|e| Failure::config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(parse_vectors(&r.vectors, n)?);
    }
    Ok(out)
}
