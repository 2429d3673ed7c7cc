//! Model roster and the catalogue of combination shapes run over it.
//!
//! Roster ids:
//!
//! | id                      | what                                            |
//! |-------------------------|-------------------------------------------------|
//! | `theta_A-1..9`          | bigram CopyMix reading the assessment           |
//! | `theta_AS-1..9`         | bigram CopyMix reading assessment + subjective  |
//! | `theta_A-v2-1..9`       | trigram variant of `theta_A-i`, same shard seed |
//! | `theta_AS-v2-1..3`      | trigram variant of `theta_AS-i`, same shard seed|
//! | `theta_A-wavg3`         | weight average of `theta_A-1..3`                |
//! | `theta_A-wavg`          | weight average of all nine `theta_A`            |
//! | `theta_AS-wavg`         | weight average of all nine `theta_AS`           |
//! | `theta_A-rl-1..3`       | copy weight re-picked by greedy-decode ROUGE-L  |
//!
//! Within each core family the index is the rank by training loss (mean
//! per-token NLL), so `-1..3` are the three lowest-loss members.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combine::weight_average;
use crate::decode::{greedy_search, DecodeParams};
use crate::fields::FieldSpec;
use crate::harness::{
    aggregate_group, assemble_input, evaluate_outputs, render_report, report_json,
    run_system_outputs, HarnessError, NoteRecord, ReportRow, ReportSection, System, SystemEval,
};
use crate::hesm::{describe_spec, validate_spec, EnsembleSpec, HesmError, ModelRegistry};
use crate::model::{
    sequence_logprob, train_copymix_with_vocab, CopyMixConfig, CopyMixModel, ModelError, SequenceModel,
    Vocab, EOS,
};
use crate::oracle::OracleMode;
use crate::rouge::Reward;

/// Sections every zoo model is trained and evaluated on; each model then
/// reads only its own fields.
pub fn zoo_fields() -> FieldSpec {
    FieldSpec::assessment_subjective()
}

/// Training subset size for re-picking the copy weight of the `rl` members.
pub const RL_SUBSET: usize = 48;

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("record `{0}` has no reference summary")]
    MissingReference(String),
    #[error("training `{id}`: {source}")]
    Train {
        id: String,
        #[source]
        source: ModelError,
    },
    #[error("fixture `{name}`: {source}")]
    Fixture {
        name: String,
        #[source]
        source: HesmError,
    },
    #[error(transparent)]
    Hesm(#[from] HesmError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("fixture file {0}: {1}")]
    Parse(String, String),
}

fn config(order: usize, smoothing: f64, fields: FieldSpec) -> CopyMixConfig {
    CopyMixConfig {
        order,
        smoothing,
        input_fields: Some(fields),
        ..CopyMixConfig::default()
    }
}

fn pairs(corpus: &[NoteRecord]) -> Result<Vec<(String, String)>, ZooError> {
    corpus
        .iter()
        .map(|r| {
            let y = r.summary.clone().ok_or_else(|| ZooError::MissingReference(r.id.clone()))?;
            Ok((assemble_input(r, &zoo_fields()), y))
        })
        .collect()
}

fn shared_vocab(pairs: &[(String, String)]) -> Arc<Vocab> {
    Arc::new(Vocab::from_texts(pairs.iter().flat_map(|(x, y)| [x.as_str(), y.as_str()])))
}

struct Job {
    id: String,
    config: CopyMixConfig,
    seed: u64,
}

fn train_jobs(
    jobs: &[Job],
    pairs: &[(String, String)],
    vocab: &Arc<Vocab>,
) -> Result<Vec<(String, CopyMixModel)>, ZooError> {
    jobs.par_iter()
        .map(|j| {
            train_copymix_with_vocab(pairs, vocab.clone(), &j.config, j.seed)
                .map(|m| (j.id.clone(), m))
                .map_err(|source| ZooError::Train {
                    id: j.id.clone(),
                    source,
                })
        })
        .collect()
}

/// Mean per-token negative log-likelihood of the references (EOS included).
fn training_loss(model: &dyn SequenceModel, pairs: &[(String, String)]) -> Result<f64, ModelError> {
    let vocab = model.vocab();
    let mut nll = 0.0;
    let mut tokens = 0usize;
    for (x, y) in pairs {
        let mut target = vocab.encode(y);
        target.push(EOS);
        nll -= sequence_logprob(model, &vocab.encode(x), &target)?;
        tokens += target.len();
    }
    Ok(nll / tokens as f64)
}

/// Trains one model per seed and numbers them `family-1..n` by increasing
/// training loss (seed order breaks ties). Returns the seeds in that order.
fn train_ranked(
    family: &str,
    config: &CopyMixConfig,
    seeds: &[u64],
    pairs: &[(String, String)],
    vocab: &Arc<Vocab>,
) -> Result<(Vec<(String, CopyMixModel)>, Vec<u64>), ZooError> {
    let jobs: Vec<Job> = seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| Job {
            id: format!("{family}-seed{i}"),
            config: config.clone(),
            seed,
        })
        .collect();
    let trained = train_jobs(&jobs, pairs, vocab)?;
    let mut scored: Vec<(f64, usize, CopyMixModel)> = trained
        .into_par_iter()
        .enumerate()
        .map(|(i, (id, m))| {
            training_loss(&m, pairs)
                .map(|loss| (loss, i, m))
                .map_err(|source| ZooError::Train { id, source })
        })
        .collect::<Result<_, _>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let order: Vec<u64> = scored.iter().map(|(_, i, _)| seeds[*i]).collect();
    let models = scored
        .into_iter()
        .enumerate()
        .map(|(rank, (_, _, m))| (format!("{family}-{}", rank + 1), m))
        .collect();
    Ok((models, order))
}

struct Core {
    models: Vec<(String, CopyMixModel)>,
    a_seeds: Vec<u64>,
    as_seeds: Vec<u64>,
}

fn train_core(
    pairs: &[(String, String)],
    vocab: &Arc<Vocab>,
    a_seeds: &[u64],
    as_seeds: &[u64],
) -> Result<Core, ZooError> {
    let (mut models, a_order) = train_ranked("theta_A", &config(2, 0.1, FieldSpec::assessment()), a_seeds, pairs, vocab)?;
    let (as_models, as_order) = train_ranked(
        "theta_AS",
        &config(2, 0.1, FieldSpec::assessment_subjective()),
        as_seeds,
        pairs,
        vocab,
    )?;
    models.extend(as_models);
    Ok(Core {
        models,
        a_seeds: a_order,
        as_seeds: as_order,
    })
}

/// Nine A-input and nine A+S-input bigram models with the given shard
/// seeds, keyed `theta_A-i` and `theta_AS-i` in order of increasing
/// training loss.
pub fn build_roster(corpus: &[NoteRecord], a_seeds: &[u64], as_seeds: &[u64]) -> Result<ModelRegistry, ZooError> {
    if corpus.is_empty() {
        return Err(ZooError::EmptyCorpus);
    }
    let pairs = pairs(corpus)?;
    let vocab = shared_vocab(&pairs);
    let mut registry = ModelRegistry::new();
    for (id, m) in train_core(&pairs, &vocab, a_seeds, as_seeds)?.models {
        registry.insert(id, m)?;
    }
    Ok(registry)
}

/// Shard seeds for every trained member, drawn from one run seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterSeeds {
    pub a: Vec<u64>,
    pub a_s: Vec<u64>,
    pub rl: Vec<u64>,
    pub rl_subset: u64,
}

impl RosterSeeds {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| (0..n).map(|_| rng.random::<u64>()).collect::<Vec<_>>();
        let a = draw(9);
        let a_s = draw(9);
        let rl = draw(3);
        let rl_subset = draw(1)[0];
        Self {
            a,
            a_s,
            rl,
            rl_subset,
        }
    }
}

/// Mean ROUGE-L F1 of greedy decodes over `subset`.
fn greedy_rouge_l(model: &CopyMixModel, subset: &[(String, String)]) -> Result<f64, ModelError> {
    let vocab = model.vocab();
    let params = DecodeParams::default();
    let reward = Reward::default();
    let mut total = 0.0;
    for (x, y) in subset {
        let hyp = greedy_search(model, &vocab.encode(x), &params).map_err(|e| match e {
            crate::decode::DecodeError::Model(m) => m,
            other => ModelError::InvalidConfig(other.to_string()),
        })?;
        total += reward.score_text(&vocab.decode(&hyp.ids), y);
    }
    Ok(total / subset.len() as f64)
}

/// Copy weight from the grid that maximizes greedy-decode ROUGE-L on the
/// subset; the earliest wins ties.
fn reselect_copy_weight(
    model: &CopyMixModel,
    grid: &[f64],
    subset: &[(String, String)],
) -> Result<CopyMixModel, ModelError> {
    let mut best: Option<(f64, CopyMixModel)> = None;
    for &lambda in grid {
        let candidate = model.with_copy_weight(lambda)?;
        let score = greedy_rouge_l(&candidate, subset)?;
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, candidate));
        }
    }
    Ok(best.expect("grid is non-empty").1)
}

/// Core roster plus the extended members listed in the module docs.
pub fn build_full_roster(corpus: &[NoteRecord], seeds: &RosterSeeds) -> Result<ModelRegistry, ZooError> {
    if corpus.is_empty() {
        return Err(ZooError::EmptyCorpus);
    }
    let pairs = pairs(corpus)?;
    let vocab = shared_vocab(&pairs);

    // Variants reuse the shard seed of the member with the same rank, with
    // different hyperparameters.
    let core = train_core(&pairs, &vocab, &seeds.a, &seeds.a_s)?;
    let mut jobs: Vec<Job> = core.a_seeds.iter().enumerate().map(|(i, &seed)| Job {
        id: format!("theta_A-v2-{}", i + 1),
        config: config(3, 0.05, FieldSpec::assessment()),
        seed,
    }).collect();
    jobs.extend(core.as_seeds.iter().take(3).enumerate().map(|(i, &seed)| Job {
        id: format!("theta_AS-v2-{}", i + 1),
        config: config(3, 0.05, FieldSpec::assessment_subjective()),
        seed,
    }));
    jobs.extend(seeds.rl.iter().enumerate().map(|(i, &seed)| Job {
        id: format!("theta_A-rl-{}", i + 1),
        config: config(2, 0.1, FieldSpec::assessment()),
        seed,
    }));
    let mut trained = core.models;
    trained.extend(train_jobs(&jobs, &pairs, &vocab)?);
    let get = |id: &str| -> &CopyMixModel {
        &trained.iter().find(|(k, _)| k == id).expect("trained above").1
    };

    let mut subset_idx: Vec<usize> = (0..pairs.len()).collect();
    subset_idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seeds.rl_subset));
    let subset: Vec<(String, String)> = subset_idx
        .iter()
        .take(RL_SUBSET)
        .map(|&i| pairs[i].clone())
        .collect();
    let grid = CopyMixConfig::default().lambda_grid;
    let rl: Vec<(String, CopyMixModel)> = (1..=seeds.rl.len())
        .into_par_iter()
        .map(|i| {
            let id = format!("theta_A-rl-{i}");
            reselect_copy_weight(get(&id), &grid, &subset)
                .map(|m| (id.clone(), m))
                .map_err(|source| ZooError::Train { id, source })
        })
        .collect::<Result<_, _>>()?;

    let wavg = |id: &str, members: Vec<String>| -> Result<(String, CopyMixModel), ZooError> {
        let refs: Vec<&CopyMixModel> = members.iter().map(|m| get(m)).collect();
        weight_average(&refs)
            .map(|m| (id.to_string(), m))
            .map_err(|source| ZooError::Train {
                id: id.to_string(),
                source,
            })
    };
    let averaged = vec![
        wavg("theta_A-wavg3", ids("theta_A", 1..=3))?,
        wavg("theta_A-wavg", ids("theta_A", 1..=9))?,
        wavg("theta_AS-wavg", ids("theta_AS", 1..=9))?,
    ];

    let mut registry = ModelRegistry::new();
    for (id, m) in trained.into_iter().filter(|(id, _)| !id.starts_with("theta_A-rl-")) {
        registry.insert(id, m)?;
    }
    for (id, m) in rl.into_iter().chain(averaged) {
        registry.insert(id, m)?;
    }
    Ok(registry)
}

fn ids(family: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{family}-{i}")).collect()
}

fn leaves(family: &str, range: std::ops::RangeInclusive<usize>) -> Vec<EnsembleSpec> {
    ids(family, range).into_iter().map(EnsembleSpec::leaf).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureMember {
    pub name: String,
    pub spec: EnsembleSpec,
}

/// One report row: a single system, or a group of systems reported as
/// mean ± std across members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub section: String,
    pub members: Vec<FixtureMember>,
}

impl Fixture {
    fn single(name: &str, section: &str, spec: EnsembleSpec) -> Self {
        Self {
            name: name.into(),
            section: section.into(),
            members: vec![FixtureMember {
                name: name.into(),
                spec,
            }],
        }
    }

    fn group(name: &str, section: &str, members: Vec<(String, EnsembleSpec)>) -> Self {
        Self {
            name: name.into(),
            section: section.into(),
            members: members
                .into_iter()
                .map(|(name, spec)| FixtureMember { name, spec })
                .collect(),
        }
    }

    pub fn is_group(&self) -> bool {
        self.members.len() > 1
    }

    /// Structural rendering of the row.
    pub fn description(&self) -> String {
        if self.is_group() {
            let first = describe_spec(&self.members[0].spec);
            if self.members.iter().all(|m| describe_spec(&m.spec) == first) {
                format!("{} × {first}", self.members.len())
            } else {
                format!("{} systems", self.members.len())
            }
        } else {
            describe_spec(&self.members[0].spec)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixture serializes");
        s.push('\n');
        s
    }
}

pub const SECTION_A: &str = "Combinations of nine A-input models";
pub const SECTION_AS: &str = "Combinations of nine A+S-input models";
pub const SECTION_MIXED: &str = "Hierarchical combinations of A and A+S models";
pub const SECTION_FINAL: &str = "Final stack";
pub const SECTION_UNPACK: &str = "Unpacked MBR";
pub const SECTION_ORACLE: &str = "Extractive upper bounds";

fn pair(i: usize) -> EnsembleSpec {
    EnsembleSpec::tokens_of([format!("theta_A-{i}"), format!("theta_AS-{i}")])
}

/// `(3, 3)` ensemble over A and A+S members `i, i+1, i+2` (1-based, cyclic).
fn three_three(start: usize) -> EnsembleSpec {
    let idx: Vec<usize> = (0..3).map(|o| (start - 1 + o) % 9 + 1).collect();
    let mut ids: Vec<String> = idx.iter().map(|i| format!("theta_A-{i}")).collect();
    ids.extend(idx.iter().map(|i| format!("theta_AS-{i}")));
    EnsembleSpec::tokens_of(ids)
}

/// The six members of the shallow HESM.
fn shallow_members() -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::leaf("theta_A-1"),
        EnsembleSpec::leaf("theta_A-wavg3"),
        EnsembleSpec::tokens_of(ids("theta_A-rl", 1..=3)),
        EnsembleSpec::tokens_of(ids("theta_A", 1..=9)),
        EnsembleSpec::tokens_of(ids("theta_A-v2", 1..=9)),
        EnsembleSpec::tokens_of(ids("theta_AS", 1..=9)),
    ]
}

fn tokens_v1() -> EnsembleSpec {
    let mut v = ids("theta_A", 1..=3);
    v.extend(ids("theta_AS", 1..=3));
    EnsembleSpec::tokens_of(v)
}

fn tokens_v2() -> EnsembleSpec {
    let mut v = ids("theta_A-v2", 1..=3);
    v.extend(ids("theta_AS-v2", 1..=3));
    EnsembleSpec::tokens_of(v)
}

/// Every leaf of the final stack, deduplicated in first-seen order.
fn unique_leaves(spec: &EnsembleSpec) -> Vec<EnsembleSpec> {
    let mut seen = Vec::<&str>::new();
    for id in spec.leaf_ids() {
        if !seen.contains(&id) {
            seen.push(id);
        }
    }
    seen.into_iter().map(EnsembleSpec::leaf).collect()
}

pub fn final_stack() -> EnsembleSpec {
    EnsembleSpec::mbr(vec![EnsembleSpec::mbr(shallow_members()), tokens_v1(), tokens_v2()])
}

pub fn list_fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    for (family, section, tag) in [("theta_A", SECTION_A, "A"), ("theta_AS", SECTION_AS, "AS")] {
        out.push(Fixture::group(
            &format!("individual-{tag}"),
            section,
            ids(family, 1..=9)
                .into_iter()
                .map(|id| (id.clone(), EnsembleSpec::leaf(id)))
                .collect(),
        ));
        out.push(Fixture::single(
            &format!("weight-avg-{tag}"),
            section,
            EnsembleSpec::leaf(format!("{family}-wavg")),
        ));
        out.push(Fixture::single(
            &format!("tokens-{tag}"),
            section,
            EnsembleSpec::tokens_of(ids(family, 1..=9)),
        ));
        out.push(Fixture::single(
            &format!("mbr-{tag}"),
            section,
            EnsembleSpec::mbr(leaves(family, 1..=9)),
        ));
    }

    out.push(Fixture::group(
        "pairs-1-1",
        SECTION_MIXED,
        (1..=9).map(|i| (format!("pair-{i}"), pair(i))).collect(),
    ));
    out.push(Fixture::single(
        "hesm-1-1-mbr9",
        SECTION_MIXED,
        EnsembleSpec::mbr((1..=9).map(pair).collect()),
    ));
    let blocks: Vec<EnsembleSpec> = [1, 4, 7].into_iter().map(three_three).collect();
    out.push(Fixture::group(
        "tokens-3-3",
        SECTION_MIXED,
        blocks
            .iter()
            .enumerate()
            .map(|(g, s)| (format!("block-{}", g + 1), s.clone()))
            .collect(),
    ));
    out.push(Fixture::single("hesm-3-3-mbr3", SECTION_MIXED, EnsembleSpec::mbr(blocks)));
    out.push(Fixture::single(
        "hesm-3-3-mbr9",
        SECTION_MIXED,
        EnsembleSpec::mbr((1..=9).map(three_three).collect()),
    ));

    out.push(Fixture::single(
        "hesm-shallow",
        SECTION_FINAL,
        EnsembleSpec::mbr(shallow_members()),
    ));
    out.push(Fixture::single("tokens-v1", SECTION_FINAL, tokens_v1()));
    out.push(Fixture::single("tokens-v2", SECTION_FINAL, tokens_v2()));
    out.push(Fixture::single("final-stack", SECTION_FINAL, final_stack()));

    let mut unpack1 = shallow_members();
    unpack1.extend(tokens_v1().children().iter().cloned());
    unpack1.extend(tokens_v2().children().iter().cloned());
    out.push(Fixture::single("unpack-1", SECTION_UNPACK, EnsembleSpec::mbr(unpack1)));
    out.push(Fixture::single(
        "unpack-2",
        SECTION_UNPACK,
        EnsembleSpec::mbr(unique_leaves(&final_stack())),
    ));
    out
}

pub fn find_fixture(name: &str) -> Option<Fixture> {
    list_fixtures().into_iter().find(|f| f.name == name)
}

/// Writes `<name>.json` for every fixture.
pub fn write_fixtures(dir: &Path) -> Result<(), ZooError> {
    fs::create_dir_all(dir).map_err(|e| ZooError::Io(dir.display().to_string(), e))?;
    for f in list_fixtures() {
        let path = dir.join(format!("{}.json", f.name));
        fs::write(&path, f.to_json()).map_err(|e| ZooError::Io(path.display().to_string(), e))?;
    }
    Ok(())
}

pub fn load_fixture(path: &Path) -> Result<Fixture, ZooError> {
    let text = fs::read_to_string(path).map_err(|e| ZooError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| ZooError::Parse(path.display().to_string(), e.to_string()))
}

/// Every violation of every fixture member against `registry`.
pub fn validate_fixtures(
    fixtures: &[Fixture],
    registry: &ModelRegistry,
    params: &DecodeParams,
) -> Result<(), ZooError> {
    for f in fixtures {
        for m in &f.members {
            let v = validate_spec(&m.spec, registry, params);
            if !v.is_empty() {
                return Err(ZooError::Fixture {
                    name: format!("{}/{}", f.name, m.name),
                    source: HesmError::Invalid(v),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooConfig {
    pub seed: u64,
    pub params: DecodeParams,
    pub workers: usize,
}

#[derive(Debug, Clone)]
pub struct ZooOutcome {
    pub sections: Vec<ReportSection>,
    pub report_text: String,
    pub report_json: String,
    /// Fixture member name → per-record outputs, in eval-record order.
    pub outputs: Vec<(String, Vec<String>)>,
}

fn row(name: &str, description: String, evals: &[SystemEval]) -> ReportRow {
    let metrics = if evals.len() == 1 {
        evals[0].metrics
    } else {
        aggregate_group(evals)
    };
    ReportRow {
        name: name.to_string(),
        description,
        n: evals[0].n,
        members: evals.len(),
        metrics,
    }
}

/// Trains the roster on `train`, runs every fixture (and the extractive
/// oracles) on `eval`, and renders the report.
pub fn run_zoo(
    train: &[NoteRecord],
    eval: &[NoteRecord],
    fixtures: &[Fixture],
    config: &ZooConfig,
) -> Result<ZooOutcome, ZooError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .expect("thread pool");
    let registry = pool.install(|| build_full_roster(train, &RosterSeeds::from_seed(config.seed)))?;
    validate_fixtures(fixtures, &registry, &config.params)?;

    let mut systems = Vec::new();
    let mut names = Vec::new();
    for f in fixtures {
        for m in &f.members {
            systems.push(System::Spec(m.spec.clone()));
            names.push(m.name.clone());
        }
    }
    systems.push(System::Oracle(OracleMode::AllOverlap));
    systems.push(System::Oracle(OracleMode::GreedyBest));
    let outputs = run_system_outputs(
        &systems,
        eval,
        &registry,
        &zoo_fields(),
        &config.params,
        config.seed,
        config.workers,
    )?;
    let evals: Vec<SystemEval> = outputs
        .iter()
        .map(|o| evaluate_outputs(o, eval))
        .collect::<Result<_, _>>()?;

    let mut sections: Vec<ReportSection> = Vec::new();
    let mut cursor = 0;
    for f in fixtures {
        let k = f.members.len();
        let r = row(&f.name, f.description(), &evals[cursor..cursor + k]);
        cursor += k;
        match sections.iter_mut().find(|s| s.title == f.section) {
            Some(s) => s.rows.push(r),
            None => sections.push(ReportSection {
                title: f.section.clone(),
                rows: vec![r],
            }),
        }
    }
    sections.push(ReportSection {
        title: SECTION_ORACLE.into(),
        rows: vec![
            row("all-overlap", "oracle".into(), &evals[cursor..cursor + 1]),
            row("greedy-best", "oracle".into(), &evals[cursor + 1..cursor + 2]),
        ],
    });

    let header = vec![
        format!(
            "zoo run: seed={} train={} eval={} fields={}",
            config.seed,
            train.len(),
            eval.len(),
            zoo_fields()
        ),
        format!(
            "decode: num_beams={} length_penalty={} min_length={} max_length={} no_repeat_ngram_size={}",
            config.params.num_beams,
            config.params.length_penalty,
            config.params.min_length,
            config.params.max_length,
            config.params.no_repeat_ngram_size
        ),
        "cells: mean±std ×100; std is across records, or across members for grouped rows".into(),
    ];
    let mut report_text = render_report(&header, &sections);
    report_text.push_str(&improvement_lines(&sections));
    let report_json = report_json(&sections);
    Ok(ZooOutcome {
        sections,
        report_text,
        report_json,
        outputs: names.into_iter().zip(outputs).collect(),
    })
}

/// ROUGE-L F1 of each row minus the mean of its section's individual
/// members (reported, not asserted).
fn improvement_lines(sections: &[ReportSection]) -> String {
    let baseline = |title: &str| {
        sections
            .iter()
            .find(|s| s.title == title)
            .and_then(|s| s.rows.iter().find(|r| r.name.starts_with("individual-")))
            .map(|r| r.metrics[2][0].mean)
    };
    let Some(base_a) = baseline(SECTION_A) else {
        return String::new();
    };
    let mut out = String::from("\nROUGE-L F1 change vs. mean individual A-input model\n");
    for s in sections {
        for r in &s.rows {
            if r.name == "individual-A" {
                continue;
            }
            out.push_str(&format!("{:<16} {:+.2}\n", r.name, r.metrics[2][0].mean - base_a));
        }
    }
    out
}
