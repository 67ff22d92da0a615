use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const KINDS: [&str; 17] = [
    "delta-estimate",
    "metric-suite",
    "phi-chain",
    "boundary-rays",
    "cone-exponents",
    "thm12-scan",
    "shifted-scan",
    "scaling-attractor",
    "hardy",
    "green",
    "martin",
    "bhp",
    "oscillation",
    "dirichlet",
    "criticality",
    "fatou",
    "minimal-growth",
];

/// One experiment of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    #[serde(default)]
    pub id: Option<String>,
    pub kind: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub resolutions: Option<Vec<usize>>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Directory for the CSV and JSON outputs.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Experiment {
    pub fn new(kind: &str) -> Self {
        Self {
            id: None,
            kind: kind.to_string(),
            seed: 0,
            resolutions: None,
            params: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            output: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn with_resolutions(mut self, r: &[usize]) -> Self {
        self.resolutions = Some(r.to_vec());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn label(&self, index: usize) -> String {
        self.id.clone().unwrap_or_else(|| format!("{}-{index}", self.kind))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub experiments: Vec<Experiment>,
    /// Default output directory.
    pub output: Option<PathBuf>,
}

/// Strict parse of a manifest document, with line/column diagnostics.
pub fn parse_manifest(text: &str) -> Result<Manifest, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let manifest = if value.get("experiments").is_some() {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Many {
            experiments: Vec<Experiment>,
            #[serde(default)]
            output: Option<PathBuf>,
        }
        let m: Many = strict_from_str(text)?;
        Manifest { experiments: m.experiments, output: m.output }
    } else {
        Manifest { experiments: vec![strict_from_str(text)?], output: None }
    };
    for e in &manifest.experiments {
        if !KINDS.contains(&e.kind.as_str()) {
            return Err(CliError::Parse(format!("unknown experiment kind '{}'", e.kind)));
        }
    }
    Ok(manifest)
}

fn strict_from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_manifest(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn flag_value(raw: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    if raw.contains(',') {
        return Value::Array(raw.split(',').map(|s| flag_value(s.trim())).collect());
    }
    Value::String(raw.to_string())
}

/// Builds an experiment from `--key value` flags; keys mirror the manifest.
pub fn experiment_from_flags(kind: &str, args: &[String]) -> Result<Experiment, CliError> {
    if !KINDS.contains(&kind) {
        return Err(CliError::Parse(format!("unknown experiment kind '{kind}'")));
    }
    let mut e = Experiment::new(kind);
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::Parse(format!("expected a --key flag, found '{flag}'")))?;
        let raw = it.next().ok_or_else(|| CliError::Parse(format!("flag --{key} needs a value")))?;
        let bad = |what: &str| CliError::Parse(format!("--{key}: expected {what}, found '{raw}'"));
        match key {
            "id" => e.id = Some(raw.clone()),
            "seed" => e.seed = raw.parse().map_err(|_| bad("an unsigned integer"))?,
            "output" => e.output = Some(PathBuf::from(raw)),
            "resolutions" => {
                e.resolutions = Some(
                    raw.split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("a comma-separated list of integers"))?,
                )
            }
            _ => {
                if let Some(name) = key.strip_prefix("tolerances.") {
                    e.tolerances.insert(name.to_string(), raw.parse().map_err(|_| bad("a number"))?);
                } else {
                    e.params.insert(key.to_string(), flag_value(raw));
                }
            }
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_list_manifests() {
        let one = parse_manifest(r#"{"kind": "cone-exponents", "params": {"p": 3}}"#).unwrap();
        assert_eq!(one.experiments.len(), 1);
        assert_eq!(one.experiments[0].params["p"], 3);
        let many = parse_manifest(r#"{"experiments": [{"kind": "hardy"}, {"kind": "green"}], "output": "out"}"#).unwrap();
        assert_eq!(many.experiments.len(), 2);
        assert_eq!(many.output, Some(PathBuf::from("out")));
    }

    #[test]
    fn unknown_keys_and_syntax_errors() {
        let e = parse_manifest(r#"{"kind": "hardy", "sed": 3}"#).unwrap_err();
        assert!(e.to_string().contains("sed"), "{e}");
        let e = parse_manifest("{\n  \"kind\": \"hardy\",\n  oops\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(parse_manifest(r#"{"kind": "nope"}"#).is_err());
        assert!(parse_manifest(r#"{"experiments": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn flags_mirror_manifest_keys() {
        let args: Vec<String> = ["--p", "3", "--potential", "jacobi", "--seed", "7", "--resolutions", "64,128", "--tolerances.fit", "0.01"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let e = experiment_from_flags("cone-exponents", &args).unwrap();
        assert_eq!(e.params["p"], 3);
        assert_eq!(e.params["potential"], "jacobi");
        assert_eq!(e.seed, 7);
        assert_eq!(e.resolutions, Some(vec![64, 128]));
        assert_eq!(e.tolerances["fit"], 0.01);
        assert!(experiment_from_flags("cone-exponents", &["--p".to_string()]).is_err());
        assert!(experiment_from_flags("cone-exponents", &["p".to_string(), "3".to_string()]).is_err());
    }
}
