//! JSON and CSV report output.
//!
//! JSON keys, in order: `observed_f1`, `chance_f1`, `corrected_f1`,
//! `difficulty`, `model`, `mode`, `per_type`, `runtime_seconds`, and an
//! optional `config` object echoing the run settings. CSV carries one header
//! and one row per scope (`overall`, then each type) with the same columns;
//! `scope` takes the place of `per_type`. Floats use 6 decimals and undefined
//! values are `null` in JSON and empty in CSV.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use super::CorpusReport;
use crate::agreement::{AgreementReport, ComputationMode, Model};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "observed_f1,chance_f1,corrected_f1,difficulty,model,mode,scope,runtime_seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn ser_round<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*x))
}

fn ser_round_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round6(*v)),
        None => s.serialize_none(),
    }
}

/// One scope's scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeScores {
    #[serde(serialize_with = "ser_round_opt")]
    pub observed_f1: Option<f64>,
    #[serde(serialize_with = "ser_round_opt")]
    pub chance_f1: Option<f64>,
    #[serde(serialize_with = "ser_round_opt")]
    pub corrected_f1: Option<f64>,
    #[serde(serialize_with = "ser_round_opt")]
    pub difficulty: Option<f64>,
    pub model: Model,
    pub mode: ComputationMode,
}

impl From<&AgreementReport> for ScopeScores {
    fn from(r: &AgreementReport) -> Self {
        ScopeScores {
            observed_f1: Some(r.observed_f1),
            chance_f1: Some(r.chance_f1),
            corrected_f1: r.corrected_f1,
            difficulty: r.difficulty,
            model: r.model,
            mode: r.mode,
        }
    }
}

/// Serializable report: overall scores, optional per-type rows, run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub overall: ScopeScores,
    pub per_type: BTreeMap<String, ScopeScores>,
    #[serde(serialize_with = "ser_round")]
    pub runtime_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Whether any cell was scored; an unscored report emits no CSV rows.
    #[serde(skip, default = "default_true")]
    pub scored: bool,
}

fn default_true() -> bool {
    true
}

impl Report {
    /// Single-comparison report.
    pub fn from_pair(report: &AgreementReport, runtime_seconds: f64) -> Self {
        Report {
            overall: report.into(),
            per_type: BTreeMap::new(),
            runtime_seconds,
            config: None,
            scored: true,
        }
    }

    pub fn from_corpus(report: &CorpusReport) -> Self {
        let scored = !report.per_type.is_empty();
        let mut overall = ScopeScores::from(&report.overall);
        if !scored {
            overall.observed_f1 = None;
            overall.chance_f1 = None;
            overall.corrected_f1 = None;
            overall.difficulty = None;
        }
        Report {
            overall,
            per_type: report.per_type.iter().map(|(k, v)| (k.clone(), v.into())).collect(),
            runtime_seconds: report.runtime_seconds,
            config: None,
            scored,
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = Some(config);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut r: Report = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        r.scored = r.overall.observed_f1.is_some();
        Ok(r)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn csv_row(scores: &ScopeScores, scope: &str, runtime: f64) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.6}",
        fmt_opt(scores.observed_f1),
        fmt_opt(scores.chance_f1),
        fmt_opt(scores.corrected_f1),
        fmt_opt(scores.difficulty),
        scores.model.as_str(),
        scores.mode.as_str(),
        csv_field(scope),
        runtime
    )
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes a report in the requested format.
pub fn emit_report<W: Write>(report: &Report, format: OutputFormat, mut out: W) -> Result<()> {
    match format {
        OutputFormat::Json => writeln!(out, "{}", report.to_json())?,
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            if report.scored {
                writeln!(out, "{}", csv_row(&report.overall, "overall", report.runtime_seconds))?;
                for (label, scores) in &report.per_type {
                    writeln!(out, "{}", csv_row(scores, label, report.runtime_seconds))?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AgreementReport {
        AgreementReport {
            observed_f1: 0.8571,
            chance_f1: 0.5335,
            corrected_f1: Some(0.6938),
            difficulty: Some(0.4606),
            model: Model::NonOverlapping,
            mode: ComputationMode::Exact,
        }
    }

    fn emit(report: &Report, format: OutputFormat) -> String {
        let mut buf = Vec::new();
        emit_report(report, format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_row_format() {
        let text = emit(&Report::from_pair(&sample(), 0.25), OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "0.857100,0.533500,0.693800,0.460600,non-overlapping,exact,overall,0.250000"
        );
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn unscored_corpus_is_header_only() {
        let corpus = CorpusReport {
            overall: sample(),
            per_type: BTreeMap::new(),
            runtime_seconds: 0.0,
        };
        let text = emit(&Report::from_corpus(&corpus), OutputFormat::Csv);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        let json = emit(&Report::from_corpus(&corpus), OutputFormat::Json);
        assert!(json.contains("\"observed_f1\": null"));
    }

    #[test]
    fn json_round_trip_and_key_order() {
        let mut per_type = BTreeMap::new();
        per_type.insert("PER".to_string(), sample());
        let corpus = CorpusReport {
            overall: sample(),
            per_type,
            runtime_seconds: 1.5,
        };
        let report = Report::from_corpus(&corpus).with_config(serde_json::json!({"seed": 7}));
        let json = report.to_json();
        let keys = ["observed_f1", "chance_f1", "corrected_f1", "difficulty", "model", "mode", "per_type", "runtime_seconds", "config"];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert_eq!(Report::from_json(&json).unwrap(), report);
    }

    #[test]
    fn json_rounds_to_six_decimals() {
        let mut r = sample();
        r.observed_f1 = 6.0 / 7.0;
        let json = Report::from_pair(&r, 0.0).to_json();
        assert!(json.contains("\"observed_f1\": 0.857143"), "{json}");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<OutputFormat>(), Ok(OutputFormat::Csv));
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
