//! JSON report: one record per check plus a summary.

use std::path::Path;

use ncdc_core::connection::RIEMANN_SIGN;
use ncdc_core::Check;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl From<&Check> for Record {
    fn from(c: &Check) -> Record {
        Record {
            id: c.id.clone(),
            anchor: c.anchor.clone(),
            status: if c.passed { Status::Pass } else { Status::Fail },
            residual: c.residual.clone(),
            note: c.note.clone(),
            timing_ms: (c.elapsed.as_secs_f64() * 1e6).round() / 1e3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub symmetrizer_weight: &'static str,
    pub riemann_sign: i64,
    pub poisson_sign: &'static str,
    pub gamma_identification: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            symmetrizer_weight: "permutation sum, no 1/k! factor",
            riemann_sign: RIEMANN_SIGN,
            poisson_sign: "{f,g} = D[mu](f) w^{mu nu} D[nu](g), w^{mu rho} w_{nu rho} = delta^mu_nu",
            gamma_identification: "gamma^{mu nu} = -b^{mu nu}",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Totals {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

/// The equation produced by `derive`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedEquation {
    /// `D[t](A) = …` fully expanded.
    pub equation: String,
    /// The same right-hand side split as `-{H,A}` plus the remainder.
    pub bracket_form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latex: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    pub dim: usize,
    pub totals: Totals,
    pub conventions: Conventions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<DerivedEquation>,
    pub timestamp: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub checks: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(
        subcommand: &str,
        seed: u64,
        dim: usize,
        checks: &[Check],
        derivation: Option<DerivedEquation>,
    ) -> Report {
        let records: Vec<Record> = checks.iter().map(Record::from).collect();
        let passed = records.iter().filter(|r| r.status == Status::Pass).count();
        Report {
            summary: Summary {
                tool: "ncdc",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: subcommand.into(),
                seed,
                dim,
                totals: Totals { checks: records.len(), passed, failed: records.len() - passed },
                conventions: Conventions::default(),
                derivation,
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            checks: records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.totals.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join("report.json");
        std::fs::write(&path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Drop the fields that legitimately differ between reruns.
pub fn strip_volatile(v: &mut serde_json::Value) {
    if let Some(checks) = v.get_mut("checks").and_then(|c| c.as_array_mut()) {
        for c in checks {
            if let Some(o) = c.as_object_mut() {
                o.remove("timing_ms");
            }
        }
    }
    if let Some(s) = v.get_mut("summary").and_then(|s| s.as_object_mut()) {
        s.remove("timestamp");
    }
}
