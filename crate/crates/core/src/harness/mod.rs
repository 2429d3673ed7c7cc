//! Data ingestion, cross-validation, synthetic data, scoring and reports.

mod eval;
mod folds;
mod report;
mod synth;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{Field, FieldSpec};
use crate::hesm::HesmError;

pub use eval::{
    aggregate_group, evaluate_outputs, evaluate_systems, run_system_outputs, MeanStd, MetricTable,
    SystemEval, System,
};
pub use folds::{kfold_split, FoldPlan};
pub use report::{render_report, report_json, ReportRow, ReportSection};
pub use synth::{synth_corpus, LengthProfile, LengthStat};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("duplicate record id `{id}` on line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("invalid fold count {k} for {n} records (need 2 <= k <= n)")]
    InvalidK { k: usize, n: usize },
    #[error("record `{0}` has no reference summary")]
    MissingReference(String),
    #[error("record `{id}`: {source}")]
    Record {
        id: String,
        #[source]
        source: HesmError,
    },
    #[error("invalid worker count 0")]
    ZeroWorkers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteRecord {
    pub id: String,
    pub assessment: String,
    pub subjective: String,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

impl NoteRecord {
    pub fn field(&self, field: Field) -> &str {
        match field {
            Field::A => &self.assessment,
            Field::S => &self.subjective,
            Field::O => &self.objective,
        }
    }

    pub fn reference(&self) -> Result<&str, HarnessError> {
        self.summary
            .as_deref()
            .ok_or_else(|| HarnessError::MissingReference(self.id.clone()))
    }
}

/// Parses JSON Lines; blank lines are skipped, ids must be unique.
pub fn parse_jsonl(text: &str) -> Result<Vec<NoteRecord>, HarnessError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: NoteRecord = serde_json::from_str(line).map_err(|e| HarnessError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(record.id.clone()) {
            return Err(HarnessError::DuplicateId {
                id: record.id,
                line: line_no,
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_jsonl(path: &Path) -> Result<Vec<NoteRecord>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_jsonl(&text)
}

pub fn to_jsonl(records: &[NoteRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn save_jsonl(path: &Path, records: &[NoteRecord]) -> Result<(), HarnessError> {
    fs::write(path, to_jsonl(records)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `"<asm> … <subj> …"` in spec order; the empty spec gives `""`.
pub fn assemble_input(record: &NoteRecord, spec: &FieldSpec) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for &field in spec.fields() {
        parts.push(field.separator());
        let text = record.field(field).trim();
        if !text.is_empty() {
            parts.push(text);
        }
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(id: &str, a: &str, s: &str, o: &str, summary: Option<&str>) -> NoteRecord {
        NoteRecord {
            id: id.into(),
            assessment: a.into(),
            subjective: s.into(),
            objective: o.into(),
            summary: summary.map(Into::into),
        }
    }

    #[test]
    fn parses_in_order_and_reports_lines() {
        let text = concat!(
            r#"{"id":"1","assessment":"a","subjective":"s","objective":"o","summary":"x"}"#, "\n",
            "\n",
            r#"{"id":"2","assessment":"a","subjective":"s","objective":"o"}"#, "\n",
            r#"{"id":"3","assessment":"a","subjective":"s","objective":"o","summary":"y"}"#, "\n",
        );
        let recs = parse_jsonl(text).unwrap();
        assert_eq!(recs.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["1", "2", "3"]);
        assert_eq!(recs[1].summary, None);

        let bad = "{\"id\":\"1\",\"assessment\":\"a\",\"subjective\":\"s\",\"objective\":\"o\"}\n{\"id\":\"2\",\"subjective\":\"s\",\"objective\":\"o\"}\n";
        match parse_jsonl(bad) {
            Err(HarnessError::Schema { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("assessment"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_jsonl("").unwrap().is_empty());
        let dup = format!("{0}\n{0}\n", r#"{"id":"1","assessment":"a","subjective":"s","objective":"o"}"#);
        assert!(matches!(parse_jsonl(&dup), Err(HarnessError::DuplicateId { line: 2, .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("notes.jsonl");
        let recs = vec![record("a", "x", "y", "z", Some("x")), record("b", "", "", "", None)];
        save_jsonl(&path, &recs).unwrap();
        assert_eq!(load_jsonl(&path).unwrap(), recs);
        assert!(load_jsonl(&dir.path().join("missing.jsonl")).is_err());
    }

    #[test]
    fn assembly() {
        let r = record("1", "sepsis likely", "feels weak", "bp 90/60", None);
        assert_eq!(
            assemble_input(&r, &FieldSpec::assessment_subjective()),
            "<asm> sepsis likely <subj> feels weak"
        );
        assert_eq!(assemble_input(&r, &FieldSpec::empty()), "");
        assert_eq!(
            assemble_input(&r, &FieldSpec::all()),
            "<asm> sepsis likely <subj> feels weak <obj> bp 90/60"
        );
    }

    fn arb_text() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c d", ""]), 0..4)
            .prop_map(|w| w.join(" ").trim().to_string())
    }

    proptest! {
        #[test]
        fn jsonl_round_trip(rows in prop::collection::vec((arb_text(), arb_text(), arb_text(), prop::option::of(arb_text())), 0..6)) {
            let recs: Vec<NoteRecord> = rows.into_iter().enumerate()
                .map(|(i, (a, s, o, y))| NoteRecord { id: format!("r{i}"), assessment: a, subjective: s, objective: o, summary: y })
                .collect();
            prop_assert_eq!(parse_jsonl(&to_jsonl(&recs)).unwrap(), recs);
        }

        #[test]
        fn assembly_is_injective(
            a in (arb_text(), arb_text(), arb_text()),
            b in (arb_text(), arb_text(), arb_text()),
            spec_a in prop::sample::select(vec!["A", "A+S", "A+S+O", "S+O", "none"]),
            spec_b in prop::sample::select(vec!["A", "A+S", "A+S+O", "S+O", "none"]),
        ) {
            let ra = record("x", &a.0, &a.1, &a.2, None);
            let rb = record("y", &b.0, &b.1, &b.2, None);
            let sa: FieldSpec = spec_a.parse().unwrap();
            let sb: FieldSpec = spec_b.parse().unwrap();
            let fa: Vec<&str> = sa.fields().iter().map(|&f| ra.field(f)).collect();
            let fb: Vec<&str> = sb.fields().iter().map(|&f| rb.field(f)).collect();
            if sa != sb || fa != fb {
                prop_assert_ne!(assemble_input(&ra, &sa), assemble_input(&rb, &sb));
            }
        }
    }
}
