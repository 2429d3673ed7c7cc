use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::DecodeParams;
use crate::fields::{Field, FieldSpec};
use crate::hesm::{EnsembleSpec, Evaluator, ModelRegistry};
use crate::oracle::{run_oracle, OracleMode, SentencePool};
use crate::rouge::{score_all, RougeScore, ScoreField};
use crate::text::tokenize;

use super::{assemble_input, HarnessError, NoteRecord};

/// Anything that maps a record to a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Spec(EnsembleSpec),
    /// Extractive oracle over the record's sentences, sections in the run's
    /// field order.
    Oracle(OracleMode),
    /// Echoes the reference.
    Reference,
    /// Always the empty string.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and population standard deviation; zeros for no values.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: 0.0, std: 0.0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

/// `[variant][field]`: variants R1, R2, RL; fields in [`ScoreField::ALL`]
/// order (F1, Prec, Rec). Values ×100.
pub type MetricTable = [[MeanStd; 3]; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEval {
    pub n: usize,
    pub metrics: MetricTable,
    /// Per-record `[R1, R2, RL]`, unscaled.
    pub per_record: Vec<[RougeScore; 3]>,
}

fn metric_table(cell: impl Fn(usize, usize) -> MeanStd) -> MetricTable {
    std::array::from_fn(|v| std::array::from_fn(|f| cell(v, f)))
}

/// Scores outputs (aligned with `records`) against their references.
pub fn evaluate_outputs(outputs: &[String], records: &[NoteRecord]) -> Result<SystemEval, HarnessError> {
    assert_eq!(outputs.len(), records.len(), "one output per record");
    let per_record = records
        .iter()
        .zip(outputs)
        .map(|(r, out)| Ok(score_all(&tokenize(out), &tokenize(r.reference()?))))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let metrics = metric_table(|v, f| {
        let vals: Vec<f64> = per_record
            .iter()
            .map(|s| 100.0 * s[v].get(ScoreField::ALL[f]))
            .collect();
        MeanStd::of(&vals)
    });
    Ok(SystemEval {
        n: records.len(),
        metrics,
        per_record,
    })
}

/// Mean and population std across member means, cell by cell.
pub fn aggregate_group(members: &[SystemEval]) -> MetricTable {
    metric_table(|v, f| {
        let means: Vec<f64> = members.iter().map(|m| m.metrics[v][f].mean).collect();
        MeanStd::of(&means)
    })
}

fn output_for(
    system: &System,
    record: &NoteRecord,
    evaluator: &Evaluator<'_>,
    fields: &FieldSpec,
) -> Result<String, HarnessError> {
    match system {
        System::Spec(spec) => evaluator.evaluate(spec).map_err(|source| HarnessError::Record {
            id: record.id.clone(),
            source,
        }),
        System::Oracle(mode) => {
            let sections: Vec<&str> = if fields.is_empty() {
                Field::ALL.iter().map(|&f| record.field(f)).collect()
            } else {
                fields.fields().iter().map(|&f| record.field(f)).collect()
            };
            Ok(run_oracle(*mode, &SentencePool::from_sections(sections), record.reference()?))
        }
        System::Reference => Ok(record.reference()?.to_string()),
        System::Empty => Ok(String::new()),
    }
}

/// `outputs[system][record]`. Records are processed in parallel on
/// `workers` threads; all systems of one record share a decode cache.
pub fn run_system_outputs(
    systems: &[System],
    records: &[NoteRecord],
    registry: &ModelRegistry,
    fields: &FieldSpec,
    params: &DecodeParams,
    seed: u64,
    workers: usize,
) -> Result<Vec<Vec<String>>, HarnessError> {
    if workers == 0 {
        return Err(HarnessError::ZeroWorkers);
    }
    let per_record = |record: &NoteRecord| -> Result<Vec<String>, HarnessError> {
        let input = assemble_input(record, fields);
        let evaluator = Evaluator::new(registry, &input, *params, seed);
        systems
            .iter()
            .map(|s| output_for(s, record, &evaluator, fields))
            .collect()
    };
    let by_record: Vec<Vec<String>> = if workers == 1 {
        records.iter().map(per_record).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| records.par_iter().map(per_record).collect::<Result<_, _>>())?
    };
    Ok((0..systems.len())
        .map(|s| by_record.iter().map(|outs| outs[s].clone()).collect())
        .collect())
}

pub fn evaluate_systems(
    systems: &[System],
    records: &[NoteRecord],
    registry: &ModelRegistry,
    fields: &FieldSpec,
    params: &DecodeParams,
    seed: u64,
    workers: usize,
) -> Result<Vec<SystemEval>, HarnessError> {
    run_system_outputs(systems, records, registry, fields, params, seed, workers)?
        .iter()
        .map(|outs| evaluate_outputs(outs, records))
        .collect()
}
