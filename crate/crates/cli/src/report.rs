use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::manifest::Experiment;

/// Result of one experiment. Deterministic for a fixed manifest and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub kind: String,
    /// SHA-256 of the canonical experiment JSON.
    pub digest: String,
    pub seed: u64,
    pub scalars: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub series: BTreeMap<String, Vec<[f64; 2]>>,
    pub notes: Vec<String>,
    pub pass: bool,
}

pub fn digest(experiment: &Experiment) -> String {
    let canonical = serde_json::to_string(experiment).expect("experiments serialize");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl Report {
    pub fn new(id: String, experiment: &Experiment) -> Self {
        Self {
            id,
            kind: experiment.kind.clone(),
            digest: digest(experiment),
            seed: experiment.seed,
            scalars: BTreeMap::new(),
            checks: BTreeMap::new(),
            series: BTreeMap::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    /// Non-finite values become notes; JSON has no encoding for them.
    pub fn scalar(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        if value.is_finite() {
            self.scalars.insert(name, value);
        } else {
            self.notes.push(format!("{name} = {value}"));
        }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.pass &= ok;
        self.checks.insert(name.into(), ok);
    }

    pub fn series(&mut self, name: impl Into<String>, points: Vec<[f64; 2]>) {
        self.series.insert(name.into(), points);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn get(&self, name: &str) -> f64 {
        self.scalars.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn passed(&self, check: &str) -> bool {
        self.checks.get(check).copied().unwrap_or(false)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,kind,name,value\n");
        for (k, v) in &self.scalars {
            let _ = writeln!(out, "{},{},{k},{v:?}", self.id, self.kind);
        }
        for (k, v) in &self.checks {
            let _ = writeln!(out, "{},{},check:{k},{v}", self.id, self.kind);
        }
        let _ = writeln!(out, "{},{},pass,{}", self.id, self.kind, self.pass);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Writes `<dir>/<id>.csv` and `<dir>/<id>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let csv = dir.join(format!("{}.csv", self.id));
        let json = dir.join(format!("{}.json", self.id));
        std::fs::write(&csv, self.to_csv()).map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
        std::fs::write(&json, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", json.display())))?;
        Ok((csv, json))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.as_str()).collect();
        if failed.is_empty() {
            format!("{} [{}]: pass", self.id, self.kind)
        } else {
            format!("{} [{}]: FAIL ({})", self.id, self.kind, failed.join(", "))
        }
    }
}

/// Plot kinds and the series each one draws from.
pub const PLOT_KINDS: [(&str, &str); 4] =
    [("osc", "osc"), ("lambda", "lambda_m"), ("ratio", "ratio_nontangential"), ("delta", "delta_vs_resolution")];

/// Two-column text for one plot kind; header only if the series is absent.
pub fn emit_plotdata(report: &Report, kind: &str) -> Result<String, CliError> {
    let (_, series) = PLOT_KINDS
        .iter()
        .find(|(k, _)| *k == kind)
        .ok_or_else(|| CliError::Parse(format!("unknown plot kind '{kind}'")))?;
    let mut out = String::from("x\ty\n");
    for [x, y] in report.series.get(*series).map(Vec::as_slice).unwrap_or(&[]) {
        let _ = writeln!(out, "{x:?}\t{y:?}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = Experiment::new("hardy");
        let b = Experiment::new("hardy").with_seed(1);
        assert_eq!(digest(&a), digest(&a.clone()));
        assert_ne!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = Report::new("x".into(), &Experiment::new("hardy"));
        r.check("ok", true);
        assert!(r.pass);
        r.check("bad", false);
        assert!(!r.pass);
        assert!(r.summary_line().contains("bad"));
        assert!(r.to_csv().ends_with("x,hardy,pass,false\n"));
    }

    #[test]
    fn plot_data() {
        let mut r = Report::new("x".into(), &Experiment::new("oscillation"));
        assert_eq!(emit_plotdata(&r, "osc").unwrap(), "x\ty\n");
        r.series("osc", vec![[0.0, 1.0], [1.0, 0.5]]);
        assert_eq!(emit_plotdata(&r, "osc").unwrap(), "x\ty\n0.0\t1.0\n1.0\t0.5\n");
        assert!(emit_plotdata(&r, "bogus").is_err());
    }
}
