use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ScenarioConfig;
use crate::{Error, Result};

/// One numeric check inside a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub repetition: usize,
    /// Grid point the check refers to (`n`, `t`, `q`, … or `null`).
    pub point: Option<f64>,
    pub estimate: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    /// Auxiliary statistic, e.g. the KS distance next to a p-value.
    pub statistic: Option<f64>,
    pub passed: bool,
}

/// A named pass/fail decision made from one or more checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub criterion: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, criterion: impl Into<String>, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            name: name.into(),
            criterion: criterion.into(),
            passed,
            checks,
            note: None,
        }
    }

    /// A verdict that failed before any check could be evaluated.
    pub fn failed(name: impl Into<String>, criterion: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            criterion: criterion.into(),
            passed: false,
            checks: Vec::new(),
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One row of `points.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub label: String,
    pub repetition: usize,
    pub point: f64,
    pub statistic: String,
    pub value: f64,
}

/// Content of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub replicas: usize,
    pub repetitions: usize,
    /// `false` while the run is in progress; a file left with `false` comes
    /// from an interrupted run.
    pub complete: bool,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    pub files: Vec<String>,
    pub config: ScenarioConfig,
    #[serde(skip)]
    pub points: Vec<PointRow>,
}

impl ScenarioReport {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            scenario: config.scenario.to_string(),
            seed: config.seed,
            replicas: config.replicas,
            repetitions: config.repetitions,
            complete: false,
            passed: false,
            verdicts: Vec::new(),
            files: Vec::new(),
            config: config.clone(),
            points: Vec::new(),
        }
    }

    /// Process exit code: 0 when every verdict passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub(crate) fn finish(&mut self) {
        self.complete = true;
        self.passed = self.verdicts.iter().all(|v| v.passed);
    }

    pub(crate) fn write(&self, dir: &Path) -> Result<()> {
        let points = dir.join("points.csv");
        let file = std::fs::File::create(&points).map_err(|e| Error::io(&points, e))?;
        let mut out = csv::Writer::from_writer(std::io::BufWriter::new(file));
        out.write_record(["label", "repetition", "point", "statistic", "value"])?;
        for row in &self.points {
            out.write_record([
                row.label.clone(),
                row.repetition.to_string(),
                row.point.to_string(),
                row.statistic.clone(),
                row.value.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io(&points, e))?;

        let summary = dir.join("summary.json");
        let tmp: PathBuf = dir.join("summary.json.tmp");
        let text = serde_json::to_string_pretty(self)? + "\n";
        let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(text.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
        drop(f);
        std::fs::rename(&tmp, &summary).map_err(|e| Error::io(&summary, e))
    }
}
