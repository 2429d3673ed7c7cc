//! Command-line entry point.
//!
//! Every subcommand writes its artifacts plus a `manifest.json` (resolved
//! configuration, input and output digests) into `--out`. Exit codes:
//! 0 success, 2 usage, 3 I/O, 4 invalid spec, 5 invalid data, 6 model or
//! decoding failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decode::{beam_search, greedy_search, sample_sequence, DecodeError, DecodeParams};
use crate::fields::FieldSpec;
use crate::harness::{
    aggregate_group, assemble_input, evaluate_outputs, kfold_split, load_jsonl, render_report,
    report_json, run_system_outputs, synth_corpus, to_jsonl, HarnessError, LengthProfile,
    MeanStd, NoteRecord, ReportRow, ReportSection, System, SystemEval,
};
use crate::hesm::{describe_spec, validate_spec, Decoder, EnsembleSpec, HesmError, ModelRegistry, ParamsOverride};
use crate::mbr::{mbr_select, Candidate, CandidatePool};
use crate::model::{load_model, train_copymix, AnyModel, CopyMixConfig, ModelError, SequenceModel};
use crate::oracle::{run_oracle, OracleMode, SentencePool};
use crate::rouge::{score, Reward, RougeVariant};
use crate::zoo::{build_full_roster, list_fixtures, run_zoo, Fixture, FixtureMember, RosterSeeds, ZooConfig, ZooError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Spec(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Spec(_) => 4,
            CliError::Data(_) => 5,
            CliError::Model(_) => 6,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match &e {
            HarnessError::Io { .. } => CliError::Io(e.to_string()),
            HarnessError::Record { source, .. } => match source {
                HesmError::Invalid(_) | HesmError::Parse(_) => CliError::Spec(e.to_string()),
                _ => CliError::Model(e.to_string()),
            },
            HarnessError::ZeroWorkers | HarnessError::InvalidK { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<HesmError> for CliError {
    fn from(e: HesmError) -> Self {
        match &e {
            HesmError::Io(..) => CliError::Io(e.to_string()),
            HesmError::Parse(_) | HesmError::Invalid(_) | HesmError::DuplicateModel(_) => {
                CliError::Spec(e.to_string())
            }
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        match &e {
            DecodeError::InvalidParams(_) => CliError::Usage(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<ZooError> for CliError {
    fn from(e: ZooError) -> Self {
        match e {
            ZooError::Harness(h) => h.into(),
            ZooError::Hesm(h) => h.into(),
            ZooError::Fixture { .. } | ZooError::Parse(..) => CliError::Spec(e.to_string()),
            ZooError::Io(..) => CliError::Io(e.to_string()),
            ZooError::EmptyCorpus | ZooError::MissingReference(_) => CliError::Data(e.to_string()),
            ZooError::Train { .. } => CliError::Model(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hesm", version, about = "Nested ensembles of summarizers: token averaging and consensus selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for per-record work; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "hesm-out")]
    out: PathBuf,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input sections, e.g. `A`, `A+S`, `A+S+O`, `none`.
    #[arg(long, global = true)]
    fields: Option<FieldSpec>,
    /// Beam width [default: 4]
    #[arg(long = "num_beams", global = true)]
    num_beams: Option<usize>,
    /// Length-penalty exponent α [default: 0.6]
    #[arg(long = "length_penalty", global = true)]
    length_penalty: Option<f64>,
    /// Minimum generated tokens before EOS [default: 5]
    #[arg(long = "min_length", global = true)]
    min_length: Option<usize>,
    /// Maximum generated tokens, EOS included [default: 256]
    #[arg(long = "max_length", global = true)]
    max_length: Option<usize>,
    /// Ban repeated n-grams of this size; 0 disables [default: 4]
    #[arg(long = "no_repeat_ngram_size", global = true)]
    no_repeat_ngram_size: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scores a hypothesis file against a reference file.
    Rouge {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// `1`, `2`, `L`, or `all`.
        #[arg(long, default_value = "all")]
        variant: String,
    },
    /// Extractive oracle summaries for every record.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        mode: OracleMode,
    },
    /// Trains one CopyMix model, or the whole roster with `--roster`.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "model")]
        id: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 0.1)]
        smoothing: f64,
        #[arg(long)]
        roster: bool,
    },
    /// Decodes every record with one model file.
    Decode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "beam")]
        decoder: String,
    },
    /// Consensus selection over candidates (one per line, or JSONL objects
    /// with `text` and optional `label`).
    Mbr {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long, default_value = "L:f1")]
        reward: Reward,
    },
    /// Ensemble specifications.
    Hesm {
        #[command(subcommand)]
        action: HesmAction,
    },
    /// k-fold cross-validation of a spec; the roster is retrained per fold.
    Cv {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Writes a synthetic corpus.
    Synth {
        #[arg(long, default_value_t = 765)]
        size: usize,
        /// Extra records written to `eval.jsonl` (the rest to `train.jsonl`).
        #[arg(long, default_value_t = 0)]
        eval_size: usize,
    },
    /// Trains the roster and runs every zoo fixture, writing the report.
    Report {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        eval: PathBuf,
        /// Directory of fixture files; the built-in catalogue by default.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum HesmAction {
    /// Evaluates a spec on every record.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Directory of model files; the roster is trained on `--train` when absent.
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
    },
    /// Prints the compact rendering of a spec.
    Describe {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Checks a spec against a model directory.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        models: PathBuf,
    },
    /// Writes the built-in fixture catalogue.
    Fixtures,
}

/// Optional settings read from `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    workers: Option<usize>,
    fields: Option<FieldSpec>,
    k: Option<usize>,
    params: Option<ParamsOverride>,
}

/// Fully resolved settings, echoed into the manifest. The worker count is
/// deliberately absent: it never changes results.
#[derive(Debug, Clone, Serialize)]
struct Resolved {
    seed: u64,
    fields: FieldSpec,
    k: usize,
    params: DecodeParams,
}

struct Run {
    resolved: Resolved,
    workers: usize,
    out: PathBuf,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        String::from_utf8(bytes).map_err(|_| CliError::Data(format!("{}: not UTF-8", path.display())))
    }

    fn records(&mut self, path: &Path) -> Result<Vec<NoteRecord>, CliError> {
        self.read(path)?;
        Ok(load_jsonl(path).map_err(|e| match e {
            HarnessError::Schema { .. } | HarnessError::DuplicateId { .. } => {
                CliError::Data(format!("{}: {e}", path.display()))
            }
            other => other.into(),
        })?)
    }

    fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.outputs.insert(rel.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn finish(&mut self, command: &str, args: serde_json::Value) -> Result<(), CliError> {
        let manifest = json!({
            "tool": "hesm",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "args": args,
            "config": self.resolved,
            "inputs": self.inputs,
            "outputs": self.outputs,
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.out.join("manifest.json");
        fs::create_dir_all(&self.out).map_err(|e| io_err(&self.out, e))?;
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit code; diagnostics go to stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(global: &GlobalArgs) -> Result<(Resolved, usize), CliError> {
    let file = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let mut params = file.params.unwrap_or_default().apply(&DecodeParams::default());
    let flags = ParamsOverride {
        num_beams: global.num_beams,
        length_penalty: global.length_penalty,
        min_length: global.min_length,
        max_length: global.max_length,
        no_repeat_ngram_size: global.no_repeat_ngram_size,
    };
    params = flags.apply(&params);
    params.validate()?;
    let workers = global.workers.or(file.workers).unwrap_or(1);
    if workers == 0 {
        return Err(CliError::Usage("--workers must be >= 1".into()));
    }
    Ok((
        Resolved {
            seed: global.seed.or(file.seed).unwrap_or(0),
            fields: global
                .fields
                .clone()
                .or(file.fields)
                .unwrap_or_else(FieldSpec::assessment_subjective),
            k: file.k.unwrap_or(5),
            params,
        },
        workers,
    ))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (resolved, workers) = resolve(&cli.global)?;
    let mut run = Run {
        resolved,
        workers,
        out: cli.global.out.clone(),
        inputs: BTreeMap::new(),
        outputs: BTreeMap::new(),
    };
    match cli.command {
        Command::Rouge { hyp, reference, variant } => cmd_rouge(&mut run, &hyp, &reference, &variant),
        Command::Oracle { data, mode } => cmd_oracle(&mut run, &data, mode),
        Command::Train {
            data,
            id,
            order,
            smoothing,
            roster,
        } => cmd_train(&mut run, &data, &id, order, smoothing, roster),
        Command::Decode { model, data, decoder } => cmd_decode(&mut run, &model, &data, &decoder),
        Command::Mbr { candidates, reward } => cmd_mbr(&mut run, &candidates, reward),
        Command::Hesm { action } => match action {
            HesmAction::Run {
                spec,
                models,
                train,
                data,
            } => cmd_hesm_run(&mut run, &spec, models.as_deref(), train.as_deref(), &data),
            HesmAction::Describe { spec } => cmd_hesm_describe(&mut run, &spec),
            HesmAction::Validate { spec, models } => cmd_hesm_validate(&mut run, &spec, &models),
            HesmAction::Fixtures => cmd_hesm_fixtures(&mut run),
        },
        Command::Cv { data, spec, k } => {
            if let Some(k) = k {
                run.resolved.k = k;
            }
            cmd_cv(&mut run, &data, &spec)
        }
        Command::Synth { size, eval_size } => cmd_synth(&mut run, size, eval_size),
        Command::Report { train, eval, fixtures } => cmd_report(&mut run, &train, &eval, fixtures.as_deref()),
    }
}

fn cmd_rouge(run: &mut Run, hyp: &Path, reference: &Path, variant: &str) -> Result<(), CliError> {
    let h = run.read(hyp)?;
    let r = run.read(reference)?;
    let variants: Vec<RougeVariant> = if variant.eq_ignore_ascii_case("all") {
        vec![RougeVariant::R1, RougeVariant::R2, RougeVariant::L]
    } else {
        vec![variant.parse().map_err(|e| CliError::Usage(format!("{e}")))?]
    };
    let mut results = BTreeMap::new();
    for v in variants {
        let s = score(&h, &r, v).map_err(|e| CliError::Usage(e.to_string()))?;
        println!("{} P={:.6} R={:.6} F1={:.6}", v.label(), s.precision, s.recall, s.f1);
        results.insert(v.label(), s);
    }
    let mut text = serde_json::to_string_pretty(&results).expect("scores serialize");
    text.push('\n');
    run.write("rouge.json", &text)?;
    run.finish(
        "rouge",
        json!({"hyp": hyp.display().to_string(), "ref": reference.display().to_string(), "variant": variant}),
    )
}

#[derive(Serialize, Deserialize)]
struct OutputLine {
    id: String,
    summary: String,
}

fn outputs_jsonl(records: &[NoteRecord], outputs: &[String]) -> String {
    let mut s = String::new();
    for (r, o) in records.iter().zip(outputs) {
        let line = OutputLine {
            id: r.id.clone(),
            summary: o.clone(),
        };
        s.push_str(&serde_json::to_string(&line).expect("serializes"));
        s.push('\n');
    }
    s
}

fn single_row(name: &str, description: String, eval: &SystemEval) -> ReportRow {
    ReportRow {
        name: name.into(),
        description,
        n: eval.n,
        members: 1,
        metrics: eval.metrics,
    }
}

fn header_lines(run: &Run, what: &str) -> Vec<String> {
    let p = &run.resolved.params;
    vec![
        format!("{what}: seed={} fields={}", run.resolved.seed, run.resolved.fields),
        format!(
            "decode: num_beams={} length_penalty={} min_length={} max_length={} no_repeat_ngram_size={}",
            p.num_beams, p.length_penalty, p.min_length, p.max_length, p.no_repeat_ngram_size
        ),
    ]
}

fn write_report(run: &mut Run, stem: &str, what: &str, sections: &[ReportSection]) -> Result<(), CliError> {
    let text = render_report(&header_lines(run, what), sections);
    print!("{text}");
    run.write(&format!("{stem}.txt"), &text)?;
    run.write(&format!("{stem}.json"), &report_json(sections))
}

fn all_labelled(records: &[NoteRecord]) -> bool {
    !records.is_empty() && records.iter().all(|r| r.summary.is_some())
}

fn cmd_oracle(run: &mut Run, data: &Path, mode: OracleMode) -> Result<(), CliError> {
    let records = run.records(data)?;
    let fields = if run.resolved.fields.is_empty() {
        FieldSpec::all()
    } else {
        run.resolved.fields.clone()
    };
    let mut outputs = Vec::new();
    for r in &records {
        let reference = r.reference()?;
        let pool = SentencePool::from_sections(fields.fields().iter().map(|&f| r.field(f)));
        outputs.push(run_oracle(mode, &pool, reference));
    }
    run.write("oracle.jsonl", &outputs_jsonl(&records, &outputs))?;
    let eval = evaluate_outputs(&outputs, &records)?;
    let sections = vec![ReportSection {
        title: "Extractive oracle".into(),
        rows: vec![single_row(&mode.to_string(), "oracle".into(), &eval)],
    }];
    write_report(run, "report", "oracle", &sections)?;
    run.finish("oracle", json!({"data": data.display().to_string(), "mode": mode}))
}

fn training_pairs(records: &[NoteRecord], fields: &FieldSpec) -> Result<Vec<(String, String)>, CliError> {
    records
        .iter()
        .map(|r| Ok((assemble_input(r, fields), r.reference()?.to_string())))
        .collect()
}

fn cmd_train(
    run: &mut Run,
    data: &Path,
    id: &str,
    order: usize,
    smoothing: f64,
    roster: bool,
) -> Result<(), CliError> {
    let records = run.records(data)?;
    if roster {
        let registry = with_pool(run.workers, || {
            build_full_roster(&records, &RosterSeeds::from_seed(run.resolved.seed))
        })?;
        for (model_id, model) in registry.iter() {
            run.write(&format!("models/{model_id}.json"), &model.to_json())?;
        }
        println!("trained {} models", registry.len());
    } else {
        let config = CopyMixConfig {
            order,
            smoothing,
            input_fields: Some(run.resolved.fields.clone()),
            ..CopyMixConfig::default()
        };
        let pairs = training_pairs(&records, &run.resolved.fields)?;
        let model = AnyModel::from(train_copymix(&pairs, &config, run.resolved.seed)?);
        run.write(&format!("models/{id}.json"), &model.to_json())?;
        println!("trained {id}");
    }
    run.finish(
        "train",
        json!({"data": data.display().to_string(), "id": id, "order": order, "smoothing": smoothing, "roster": roster}),
    )
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

fn cmd_decode(run: &mut Run, model_path: &Path, data: &Path, decoder: &str) -> Result<(), CliError> {
    run.read(model_path)?;
    let model = load_model(model_path)?;
    let records = run.records(data)?;
    let decoder: Decoder = serde_json::from_value(json!(decoder))
        .map_err(|_| CliError::Usage(format!("unknown decoder `{decoder}` (beam|greedy|sample)")))?;
    let vocab = model.vocab().clone();
    let params = run.resolved.params;
    let mut lines = String::new();
    let mut outputs = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let x = vocab.encode(&assemble_input(r, &run.resolved.fields));
        let hyp = match decoder {
            Decoder::Beam => beam_search(&model, &x, &params)?.into_iter().next().expect("at least one beam"),
            Decoder::Greedy => greedy_search(&model, &x, &params)?,
            Decoder::Sample => sample_sequence(&model, &x, &params, run.resolved.seed.wrapping_add(i as u64))?,
        };
        let text = vocab.decode(&hyp.ids);
        lines.push_str(&serde_json::to_string(&json!({"id": r.id, "summary": text, "logprob": hyp.logprob})).expect("serializes"));
        lines.push('\n');
        outputs.push(text);
    }
    run.write("decoded.jsonl", &lines)?;
    if all_labelled(&records) {
        let eval = evaluate_outputs(&outputs, &records)?;
        let name = model_path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
        let sections = vec![ReportSection {
            title: "Decoded".into(),
            rows: vec![single_row(name, format!("{decoder:?}").to_lowercase(), &eval)],
        }];
        write_report(run, "report", "decode", &sections)?;
    }
    run.finish(
        "decode",
        json!({"model": model_path.display().to_string(), "data": data.display().to_string(), "decoder": decoder}),
    )
}

fn parse_candidates(text: &str) -> Result<Vec<Candidate>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with('{') {
            let c: Candidate = serde_json::from_str(line)
                .map_err(|e| CliError::Data(format!("candidates line {}: {e}", i + 1)))?;
            out.push(c);
        } else {
            out.push(Candidate {
                text: line.to_string(),
                label: format!("line-{}", i + 1),
            });
        }
    }
    Ok(out)
}

fn cmd_mbr(run: &mut Run, path: &Path, reward: Reward) -> Result<(), CliError> {
    let text = run.read(path)?;
    let pool = CandidatePool::new(parse_candidates(&text)?).map_err(|e| CliError::Data(e.to_string()))?;
    let result = mbr_select(&pool, &reward);
    let selected = pool.text(result.selected_index).to_string();
    println!("{selected}");
    let body = json!({
        "selected_index": result.selected_index,
        "selected_text": selected,
        "selected_label": pool.candidates()[result.selected_index].label,
        "consensus_scores": result.consensus_scores,
        "reward_matrix": result.reward_matrix,
        "reward": reward.to_string(),
    });
    let mut s = serde_json::to_string_pretty(&body).expect("serializes");
    s.push('\n');
    run.write("mbr.json", &s)?;
    run.finish("mbr", json!({"candidates": path.display().to_string(), "reward": reward.to_string()}))
}

/// Reads either a bare spec or a fixture file.
fn read_fixture(run: &mut Run, path: &Path) -> Result<Fixture, CliError> {
    let text = run.read(path)?;
    if let Ok(f) = serde_json::from_str::<Fixture>(&text) {
        return Ok(f);
    }
    let spec = EnsembleSpec::from_json(&text)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spec").to_string();
    Ok(Fixture {
        name: name.clone(),
        section: "Spec".into(),
        members: vec![FixtureMember { name, spec }],
    })
}

fn check_fixture(fixture: &Fixture, registry: &ModelRegistry, params: &DecodeParams) -> Result<(), CliError> {
    let mut all = Vec::new();
    for m in &fixture.members {
        for mut v in validate_spec(&m.spec, registry, params) {
            if fixture.members.len() > 1 {
                v.path = format!("{}:{}", m.name, v.path);
            }
            all.push(v);
        }
    }
    if all.is_empty() {
        Ok(())
    } else {
        Err(HesmError::Invalid(all).into())
    }
}

fn registry_inputs(run: &mut Run, dir: &Path) -> Result<ModelRegistry, CliError> {
    let registry = ModelRegistry::load_dir(dir)?;
    for id in registry.ids() {
        let path = dir.join(format!("{id}.json"));
        let bytes = fs::read(&path).map_err(|e| io_err(&path, e))?;
        run.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
    }
    Ok(registry)
}

fn fixture_rows(fixture: &Fixture, evals: &[SystemEval]) -> ReportRow {
    ReportRow {
        name: fixture.name.clone(),
        description: fixture.description(),
        n: evals[0].n,
        members: evals.len(),
        metrics: if evals.len() == 1 { evals[0].metrics } else { aggregate_group(evals) },
    }
}

fn cmd_hesm_run(
    run: &mut Run,
    spec_path: &Path,
    models: Option<&Path>,
    train: Option<&Path>,
    data: &Path,
) -> Result<(), CliError> {
    let fixture = read_fixture(run, spec_path)?;
    let registry = match (models, train) {
        (Some(dir), _) => registry_inputs(run, dir)?,
        (None, Some(train)) => {
            let records = run.records(train)?;
            with_pool(run.workers, || build_full_roster(&records, &RosterSeeds::from_seed(run.resolved.seed)))?
        }
        (None, None) => return Err(CliError::Usage("hesm run needs --models or --train".into())),
    };
    check_fixture(&fixture, &registry, &run.resolved.params)?;
    let records = run.records(data)?;
    let systems: Vec<System> = fixture.members.iter().map(|m| System::Spec(m.spec.clone())).collect();
    let outputs = run_system_outputs(
        &systems,
        &records,
        &registry,
        &run.resolved.fields,
        &run.resolved.params,
        run.resolved.seed,
        run.workers,
    )?;
    for (m, outs) in fixture.members.iter().zip(&outputs) {
        let rel = if fixture.members.len() == 1 {
            "outputs.jsonl".to_string()
        } else {
            format!("outputs/{}.jsonl", m.name)
        };
        run.write(&rel, &outputs_jsonl(&records, outs))?;
    }
    if all_labelled(&records) {
        let evals: Vec<SystemEval> = outputs
            .iter()
            .map(|o| evaluate_outputs(o, &records))
            .collect::<Result<_, _>>()?;
        let sections = vec![ReportSection {
            title: fixture.section.clone(),
            rows: vec![fixture_rows(&fixture, &evals)],
        }];
        write_report(run, "report", "hesm run", &sections)?;
    }
    run.finish(
        "hesm run",
        json!({
            "spec": spec_path.display().to_string(),
            "models": models.map(|p| p.display().to_string()),
            "train": train.map(|p| p.display().to_string()),
            "data": data.display().to_string(),
        }),
    )
}

fn cmd_hesm_describe(run: &mut Run, spec_path: &Path) -> Result<(), CliError> {
    let fixture = read_fixture(run, spec_path)?;
    let mut text = String::new();
    for m in &fixture.members {
        text.push_str(&format!("{}\t{}\n", m.name, describe_spec(&m.spec)));
    }
    print!("{text}");
    run.write("describe.txt", &text)?;
    run.finish("hesm describe", json!({"spec": spec_path.display().to_string()}))
}

fn cmd_hesm_validate(run: &mut Run, spec_path: &Path, models: &Path) -> Result<(), CliError> {
    let fixture = read_fixture(run, spec_path)?;
    let registry = registry_inputs(run, models)?;
    check_fixture(&fixture, &registry, &run.resolved.params)?;
    println!("ok");
    run.write("validate.txt", "ok\n")?;
    run.finish(
        "hesm validate",
        json!({"spec": spec_path.display().to_string(), "models": models.display().to_string()}),
    )
}

fn cmd_hesm_fixtures(run: &mut Run) -> Result<(), CliError> {
    for f in list_fixtures() {
        run.write(&format!("fixtures/{}.json", f.name), &f.to_json())?;
        println!("{}\t{}", f.name, f.description());
    }
    run.finish("hesm fixtures", json!({}))
}

fn cmd_cv(run: &mut Run, data: &Path, spec_path: &Path) -> Result<(), CliError> {
    let fixture = read_fixture(run, spec_path)?;
    let records = run.records(data)?;
    let k = run.resolved.k;
    let seed = run.resolved.seed;
    let plan = kfold_split(&records, k, seed)?;
    let mut plan_text = serde_json::to_string_pretty(&plan).expect("serializes");
    plan_text.push('\n');
    run.write("cv/folds.json", &plan_text)?;

    let systems: Vec<System> = fixture.members.iter().map(|m| System::Spec(m.spec.clone())).collect();
    // Per member: outputs over all records, each filled in by its test fold.
    let mut pooled: Vec<Vec<Option<String>>> = vec![vec![None; records.len()]; systems.len()];
    let mut fold_rows = Vec::new();
    for f in 0..k {
        let (train, test): (Vec<NoteRecord>, Vec<NoteRecord>) = {
            let (tr, te) = plan.split(&records, f);
            (tr.into_iter().cloned().collect(), te.into_iter().cloned().collect())
        };
        let fold_seed = seed.wrapping_add(f as u64);
        let registry = with_pool(run.workers, || build_full_roster(&train, &RosterSeeds::from_seed(fold_seed)))?;
        check_fixture(&fixture, &registry, &run.resolved.params)?;
        let outputs = run_system_outputs(
            &systems,
            &test,
            &registry,
            &run.resolved.fields,
            &run.resolved.params,
            fold_seed,
            run.workers,
        )?;
        let evals: Vec<SystemEval> = outputs
            .iter()
            .map(|o| evaluate_outputs(o, &test))
            .collect::<Result<_, _>>()?;
        let mut row = fixture_rows(&fixture, &evals);
        row.name = format!("fold-{f}");
        let section = vec![ReportSection {
            title: format!("{} (fold {f} of {k})", fixture.name),
            rows: vec![row.clone()],
        }];
        write_report(run, &format!("cv/fold-{f}"), "cv", &section)?;
        fold_rows.push(row);
        for (s, outs) in outputs.into_iter().enumerate() {
            for (r, o) in test.iter().zip(outs) {
                let idx = records.iter().position(|x| x.id == r.id).expect("test record is in data");
                pooled[s][idx] = Some(o);
            }
        }
    }
    let pooled: Vec<Vec<String>> = pooled
        .into_iter()
        .map(|v| v.into_iter().map(|o| o.expect("every record tested once")).collect())
        .collect();
    let evals: Vec<SystemEval> = pooled
        .iter()
        .map(|o| evaluate_outputs(o, &records))
        .collect::<Result<_, _>>()?;
    let mut all_row = fixture_rows(&fixture, &evals);
    all_row.name = "all-records".into();
    let across_folds = ReportRow {
        name: "across-folds".into(),
        description: fixture.description(),
        n: records.len(),
        members: k,
        metrics: std::array::from_fn(|v| {
            std::array::from_fn(|c| {
                let means: Vec<f64> = fold_rows.iter().map(|r| r.metrics[v][c].mean).collect();
                MeanStd::of(&means)
            })
        }),
    };
    let sections = vec![ReportSection {
        title: format!("{} ({k}-fold cross-validation)", fixture.name),
        rows: vec![all_row, across_folds],
    }];
    write_report(run, "cv/aggregate", "cv", &sections)?;
    run.finish(
        "cv",
        json!({"data": data.display().to_string(), "spec": spec_path.display().to_string(), "k": k}),
    )
}

fn cmd_synth(run: &mut Run, size: usize, eval_size: usize) -> Result<(), CliError> {
    if size == 0 {
        return Err(CliError::Usage("--size must be >= 1".into()));
    }
    let records = synth_corpus(run.resolved.seed, size + eval_size, &LengthProfile::default());
    if eval_size == 0 {
        run.write("notes.jsonl", &to_jsonl(&records))?;
    } else {
        run.write("train.jsonl", &to_jsonl(&records[..size]))?;
        run.write("eval.jsonl", &to_jsonl(&records[size..]))?;
    }
    println!("wrote {} records", records.len());
    run.finish("synth", json!({"size": size, "eval_size": eval_size}))
}

fn cmd_report(run: &mut Run, train_path: &Path, eval_path: &Path, fixtures_dir: Option<&Path>) -> Result<(), CliError> {
    let train = run.records(train_path)?;
    let eval = run.records(eval_path)?;
    let fixtures = match fixtures_dir {
        None => list_fixtures(),
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| io_err(dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            let mut by_name: BTreeMap<String, Fixture> = BTreeMap::new();
            for p in paths {
                let f = read_fixture(run, &p)?;
                by_name.insert(f.name.clone(), f);
            }
            // Catalogue order first, then any extra fixtures by name.
            let mut ordered: Vec<Fixture> = list_fixtures()
                .into_iter()
                .filter_map(|f| by_name.remove(&f.name))
                .collect();
            ordered.extend(by_name.into_values());
            ordered
        }
    };
    let config = ZooConfig {
        seed: run.resolved.seed,
        params: run.resolved.params,
        workers: run.workers,
    };
    let outcome = run_zoo(&train, &eval, &fixtures, &config)?;
    print!("{}", outcome.report_text);
    run.write("report.txt", &outcome.report_text)?;
    run.write("report.json", &outcome.report_json)?;
    for (name, outs) in &outcome.outputs {
        run.write(&format!("outputs/{name}.jsonl"), &outputs_jsonl(&eval, outs))?;
    }
    run.finish(
        "report",
        json!({
            "train": train_path.display().to_string(),
            "eval": eval_path.display().to_string(),
            "fixtures": fixtures_dir.map(|p| p.display().to_string()),
        }),
    )
}
