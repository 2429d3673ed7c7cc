//! Hierarchical ensemble specifications and their evaluation.
//!
//! A spec is a tree: leaves name registered models, token-ensemble nodes
//! average their children's distributions and are decoded as one model, and
//! MBR nodes decode each child separately and pick the consensus output.
//!
//! ```json
//! {"kind": "mbr", "children": [
//!   {"kind": "token_ensemble", "children": [
//!     {"kind": "leaf", "model": "theta_A-1"},
//!     {"kind": "leaf", "model": "theta_AS-1"}]},
//!   {"kind": "leaf", "model": "theta_A-2", "params": {"num_beams": 2}}
//! ]}
//! ```
//!
//! `params` may appear on any node and overrides the run's decoding
//! parameters for that subtree (the nearest ancestor wins). MBR nodes accept
//! `reward` (default ROUGE-L F1) and `top_k`, the number of beams each
//! directly decoded child contributes to the pool (default 1).

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combine::TokenEnsembleModel;
use crate::decode::{beam_search, greedy_search, sample_sequence, DecodeError, DecodeParams};
use crate::mbr::{mbr_select, CandidatePool, Candidate};
use crate::model::{load_model, save_model, AnyModel, ModelError, SequenceModel, Vocab};
use crate::rouge::Reward;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_beams: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_repeat_ngram_size: Option<usize>,
}

impl ParamsOverride {
    pub fn apply(&self, base: &DecodeParams) -> DecodeParams {
        DecodeParams {
            num_beams: self.num_beams.unwrap_or(base.num_beams),
            length_penalty: self.length_penalty.unwrap_or(base.length_penalty),
            min_length: self.min_length.unwrap_or(base.min_length),
            max_length: self.max_length.unwrap_or(base.max_length),
            no_repeat_ngram_size: self.no_repeat_ngram_size.unwrap_or(base.no_repeat_ngram_size),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    #[default]
    Beam,
    Greedy,
    /// Seeded ancestral sampling; the seed mixes the run seed with the
    /// node's path.
    Sample,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

fn default_top_k() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    Leaf {
        model: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<ParamsOverride>,
        #[serde(default, skip_serializing_if = "is_default")]
        decoder: Decoder,
    },
    TokenEnsemble {
        children: Vec<EnsembleSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<ParamsOverride>,
        #[serde(default, skip_serializing_if = "is_default")]
        decoder: Decoder,
    },
    #[serde(rename = "mbr")]
    MbrSelect {
        children: Vec<EnsembleSpec>,
        #[serde(default, skip_serializing_if = "is_default")]
        reward: Reward,
        #[serde(default = "default_top_k", skip_serializing_if = "is_one")]
        top_k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<ParamsOverride>,
    },
}

impl EnsembleSpec {
    pub fn leaf(model: impl Into<String>) -> Self {
        EnsembleSpec::Leaf {
            model: model.into(),
            params: None,
            decoder: Decoder::Beam,
        }
    }

    pub fn tokens(children: Vec<EnsembleSpec>) -> Self {
        EnsembleSpec::TokenEnsemble {
            children,
            params: None,
            decoder: Decoder::Beam,
        }
    }

    pub fn tokens_of<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::tokens(ids.into_iter().map(Self::leaf).collect())
    }

    pub fn mbr(children: Vec<EnsembleSpec>) -> Self {
        EnsembleSpec::MbrSelect {
            children,
            reward: Reward::default(),
            top_k: 1,
            params: None,
        }
    }

    pub fn params(&self) -> Option<&ParamsOverride> {
        match self {
            EnsembleSpec::Leaf { params, .. }
            | EnsembleSpec::TokenEnsemble { params, .. }
            | EnsembleSpec::MbrSelect { params, .. } => params.as_ref(),
        }
    }

    pub fn children(&self) -> &[EnsembleSpec] {
        match self {
            EnsembleSpec::Leaf { .. } => &[],
            EnsembleSpec::TokenEnsemble { children, .. } | EnsembleSpec::MbrSelect { children, .. } => {
                children
            }
        }
    }

    /// Model ids of every leaf, in depth-first order (with repeats).
    pub fn leaf_ids(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            EnsembleSpec::Leaf { model, .. } => out.push(model),
            _ => self.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HesmError> {
        serde_json::from_str(text).map_err(|e| HesmError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, HesmError> {
        let text = fs::read_to_string(path).map_err(|e| HesmError::Io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Error)]
pub enum HesmError {
    #[error("spec parse error: {0}")]
    Parse(String),
    #[error("{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("at {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: DecodeError,
    },
    #[error("at {path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
    #[error("duplicate model id `{0}`")]
    DuplicateModel(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    ModelFile(String, #[source] ModelError),
}

fn format_violations(v: &[Violation]) -> String {
    let parts: Vec<String> = v.iter().map(|v| v.to_string()).collect();
    format!("invalid spec: {}", parts.join("; "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Immutable id → model map.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, Arc<AnyModel>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, model: impl Into<AnyModel>) -> Result<(), HesmError> {
        let id = id.into();
        if self.models.contains_key(&id) {
            return Err(HesmError::DuplicateModel(id));
        }
        self.models.insert(id, Arc::new(model.into()));
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Arc<AnyModel>> {
        self.models.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Arc<AnyModel>)> {
        self.models.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Loads every `*.json` model file in `dir`; ids are file stems.
    pub fn load_dir(dir: &Path) -> Result<Self, HesmError> {
        let io = |e| HesmError::Io(dir.display().to_string(), e);
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(io)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(io)?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut registry = Self::new();
        for path in paths {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let model =
                load_model(&path).map_err(|e| HesmError::ModelFile(path.display().to_string(), e))?;
            registry.insert(id, model)?;
        }
        Ok(registry)
    }

    /// Writes `<id>.json` per model.
    pub fn save_dir(&self, dir: &Path) -> Result<(), HesmError> {
        fs::create_dir_all(dir).map_err(|e| HesmError::Io(dir.display().to_string(), e))?;
        for (id, model) in &self.models {
            let path = dir.join(format!("{id}.json"));
            save_model(&path, model).map_err(|e| HesmError::ModelFile(path.display().to_string(), e))?;
        }
        Ok(())
    }
}

fn child_path(path: &str, i: usize) -> String {
    format!("{path}.children[{i}]")
}

pub const ROOT_PATH: &str = "$";

/// Every violation of the spec grammar, id resolution, vocabulary sharing
/// inside token ensembles, and parameter validity. Empty means valid.
pub fn validate_spec(spec: &EnsembleSpec, registry: &ModelRegistry, params: &DecodeParams) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_node(spec, registry, params, ROOT_PATH, false, &mut out);
    out
}

fn validate_node(
    node: &EnsembleSpec,
    registry: &ModelRegistry,
    inherited: &DecodeParams,
    path: &str,
    under_tokens: bool,
    out: &mut Vec<Violation>,
) {
    let mut push = |message: String| {
        out.push(Violation {
            path: path.to_string(),
            message,
        })
    };
    let params = node.params().map_or(*inherited, |o| o.apply(inherited));
    if let Err(e) = params.validate() {
        push(e.to_string());
    }
    match node {
        EnsembleSpec::Leaf { model, .. } => {
            if registry.get(model).is_none() {
                push(format!("unresolved model `{model}`"));
            }
        }
        EnsembleSpec::TokenEnsemble { children, .. } => {
            if children.is_empty() {
                push("empty token ensemble".into());
            }
            if !under_tokens {
                let vocabs: Vec<(&str, &Arc<Vocab>)> = node
                    .leaf_ids()
                    .into_iter()
                    .filter_map(|id| registry.get(id).map(|m| (id, m.vocab())))
                    .collect();
                if let Some((first_id, first)) = vocabs.first() {
                    for (id, v) in &vocabs[1..] {
                        if !Arc::ptr_eq(v, first) && v != first {
                            push(format!(
                                "vocabulary mismatch between `{first_id}` and `{id}`"
                            ));
                            break;
                        }
                    }
                }
            }
        }
        EnsembleSpec::MbrSelect { children, top_k, .. } => {
            if under_tokens {
                push("MBR node under token ensemble".into());
            }
            if children.is_empty() {
                push("empty MBR node".into());
            }
            if *top_k == 0 {
                push("top_k must be >= 1".into());
            }
        }
    }
    let into_tokens = under_tokens || matches!(node, EnsembleSpec::TokenEnsemble { .. });
    for (i, child) in node.children().iter().enumerate() {
        validate_node(child, registry, &params, &child_path(path, i), into_tokens, out);
    }
}

fn mix_seed(seed: u64, path: &str) -> u64 {
    // FNV-1a over the path, folded into the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in path.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Evaluates specs on one input, memoizing every decoded subtree so that
/// shapes sharing members (fixtures of one zoo, say) decode each member once.
pub struct Evaluator<'r> {
    registry: &'r ModelRegistry,
    input: String,
    params: DecodeParams,
    seed: u64,
    cache: RefCell<HashMap<String, Arc<Vec<String>>>>,
}

impl<'r> Evaluator<'r> {
    pub fn new(registry: &'r ModelRegistry, input: &str, params: DecodeParams, seed: u64) -> Self {
        Self {
            registry,
            input: input.to_string(),
            params,
            seed,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn evaluate(&self, spec: &EnsembleSpec) -> Result<String, HesmError> {
        let violations = validate_spec(spec, self.registry, &self.params);
        if !violations.is_empty() {
            return Err(HesmError::Invalid(violations));
        }
        let texts = self.outputs(spec, &self.params, ROOT_PATH, 1)?;
        Ok(texts[0].clone())
    }

    /// Up to `k` ranked output texts of a node. MBR nodes always give one.
    fn outputs(
        &self,
        node: &EnsembleSpec,
        inherited: &DecodeParams,
        path: &str,
        k: usize,
    ) -> Result<Arc<Vec<String>>, HesmError> {
        let params = node.params().map_or(*inherited, |o| o.apply(inherited));
        let decoder = match node {
            EnsembleSpec::Leaf { decoder, .. } | EnsembleSpec::TokenEnsemble { decoder, .. } => *decoder,
            EnsembleSpec::MbrSelect { .. } => Decoder::Beam,
        };
        // Sampled outputs depend on the node's position; everything else
        // depends only on the subtree and the parameters.
        let key = format!(
            "{}|{}|{k}|{}",
            serde_json::to_string(node).expect("spec serializes"),
            serde_json::to_string(&params).expect("params serialize"),
            if decoder == Decoder::Sample { path } else { "" },
        );
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let texts = match node {
            EnsembleSpec::MbrSelect {
                children, reward, top_k, ..
            } => {
                let mut candidates = Vec::new();
                for (i, child) in children.iter().enumerate() {
                    let cp = child_path(path, i);
                    for text in self.outputs(child, &params, &cp, *top_k)?.iter() {
                        candidates.push(Candidate {
                            text: text.clone(),
                            label: cp.clone(),
                        });
                    }
                }
                let pool = CandidatePool::new(candidates).expect("validated non-empty");
                let chosen = mbr_select(&pool, reward).selected_index;
                vec![pool.text(chosen).to_string()]
            }
            _ => {
                let model = self.build_model(node, path)?;
                let vocab = model.vocab().clone();
                let x = vocab.encode(&self.input);
                let decode_err = |source| HesmError::Decode {
                    path: path.to_string(),
                    source,
                };
                let hyps = match decoder {
                    Decoder::Beam => beam_search(model.as_ref(), &x, &params).map_err(decode_err)?,
                    Decoder::Greedy => vec![greedy_search(model.as_ref(), &x, &params).map_err(decode_err)?],
                    Decoder::Sample => vec![sample_sequence(
                        model.as_ref(),
                        &x,
                        &params,
                        mix_seed(self.seed, path),
                    )
                    .map_err(decode_err)?],
                };
                hyps.iter().take(k).map(|h| vocab.decode(&h.ids)).collect()
            }
        };
        let texts = Arc::new(texts);
        self.cache.borrow_mut().insert(key, texts.clone());
        Ok(texts)
    }

    fn build_model(&self, node: &EnsembleSpec, path: &str) -> Result<Arc<dyn SequenceModel>, HesmError> {
        match node {
            EnsembleSpec::Leaf { model, .. } => {
                let m = self.registry.get(model).expect("validated");
                Ok(m.clone() as Arc<dyn SequenceModel>)
            }
            EnsembleSpec::TokenEnsemble { children, .. } => {
                let members = children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| self.build_model(c, &child_path(path, i)))
                    .collect::<Result<Vec<_>, _>>()?;
                let ens = TokenEnsembleModel::new(members).map_err(|source| HesmError::Model {
                    path: path.to_string(),
                    source,
                })?;
                Ok(Arc::new(ens))
            }
            EnsembleSpec::MbrSelect { .. } => unreachable!("validated: no MBR under token ensemble"),
        }
    }
}

/// Output text of `spec` for one input text.
pub fn evaluate_spec(
    spec: &EnsembleSpec,
    registry: &ModelRegistry,
    input: &str,
    params: &DecodeParams,
    seed: u64,
) -> Result<String, HesmError> {
    Evaluator::new(registry, input, *params, seed).evaluate(spec)
}

/// Compact rendering: a token ensemble made only of `theta_A…` and
/// `theta_AS…` leaves prints as `(a, b)`, an MBR node over identically
/// rendered children as `<child> / MBR=n`.
pub fn describe_spec(spec: &EnsembleSpec) -> String {
    match spec {
        EnsembleSpec::Leaf { model, .. } => model.clone(),
        EnsembleSpec::TokenEnsemble { children, .. } => {
            let ids = spec.leaf_ids();
            let a = ids.iter().filter(|id| is_family(id, "theta_A-")).count();
            let b = ids.iter().filter(|id| is_family(id, "theta_AS-")).count();
            if a + b == ids.len() && !ids.is_empty() {
                format!("({a}, {b})")
            } else {
                let inner: Vec<String> = children.iter().map(describe_spec).collect();
                format!("TokEns[{}]", inner.join(", "))
            }
        }
        EnsembleSpec::MbrSelect { children, .. } => {
            let inner: Vec<String> = children.iter().map(describe_spec).collect();
            match inner.first() {
                Some(first) if inner.iter().all(|d| d == first) => {
                    format!("{first} / MBR={}", inner.len())
                }
                _ if inner.len() > 6 => format!(
                    "MBR={}[{}, … +{} more]",
                    inner.len(),
                    inner[..3].join(", "),
                    inner.len() - 3
                ),
                _ => format!("MBR={}[{}]", inner.len(), inner.join(", ")),
            }
        }
    }
}

fn is_family(id: &str, prefix: &str) -> bool {
    id.strip_prefix(prefix)
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Distribution, TableModel, EOS};

    fn registry() -> ModelRegistry {
        let vocab = Arc::new(Vocab::from_words(["fever", "sepsis"]));
        let mut reg = ModelRegistry::new();
        for (id, word) in [("theta_A-1", "fever"), ("theta_AS-1", "sepsis"), ("theta_A-2", "sepsis")] {
            let w = vocab.id(word).unwrap();
            let mut t = TableModel::new(vocab.clone(), Distribution::one_hot(vocab.len(), EOS)).unwrap();
            let mut p = vec![0.0; vocab.len()];
            p[w as usize] = 0.7;
            p[EOS as usize] = 0.3;
            t.insert(vec![], Distribution::new(p).unwrap()).unwrap();
            reg.insert(id, t).unwrap();
        }
        reg
    }

    fn params() -> DecodeParams {
        DecodeParams {
            min_length: 0,
            ..DecodeParams::default()
        }
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let text = r#"{"kind":"mbr","children":[
            {"kind":"token_ensemble","children":[{"kind":"leaf","model":"theta_A-1"}]},
            {"kind":"leaf","model":"theta_AS-1","params":{"num_beams":2}}]}"#;
        let spec = EnsembleSpec::from_json(text).unwrap();
        let EnsembleSpec::MbrSelect { top_k, reward, .. } = &spec else { panic!() };
        assert_eq!((*top_k, *reward), (1, Reward::default()));
        assert_eq!(EnsembleSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(EnsembleSpec::from_json(r#"{"kind":"leaf"}"#).is_err());
        assert!(EnsembleSpec::from_json(r#"{"kind":"leaf","model":"x","bogus":1}"#).is_err());
    }

    #[test]
    fn violations() {
        let reg = registry();
        let v = validate_spec(&EnsembleSpec::leaf("nope"), &reg, &params());
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("unresolved model"));

        let bad = EnsembleSpec::tokens(vec![EnsembleSpec::mbr(vec![EnsembleSpec::leaf("theta_A-1")])]);
        let v = validate_spec(&bad, &reg, &params());
        assert!(v.iter().any(|v| v.message == "MBR node under token ensemble" && v.path == "$.children[0]"));

        let empty = EnsembleSpec::mbr(vec![]);
        assert!(!validate_spec(&empty, &reg, &params()).is_empty());

        let bad_params = EnsembleSpec::Leaf {
            model: "theta_A-1".into(),
            params: Some(ParamsOverride {
                num_beams: Some(0),
                ..Default::default()
            }),
            decoder: Decoder::Beam,
        };
        assert!(!validate_spec(&bad_params, &reg, &params()).is_empty());

        let mut reg2 = reg.clone();
        let other = Arc::new(Vocab::from_words(["x"]));
        reg2.insert("foreign", TableModel::new(other.clone(), Distribution::one_hot(other.len(), EOS)).unwrap())
            .unwrap();
        let mixed = EnsembleSpec::tokens_of(["theta_A-1", "foreign"]);
        assert!(validate_spec(&mixed, &reg2, &params())
            .iter()
            .any(|v| v.message.contains("vocabulary mismatch")));
        // Different vocabularies are fine under MBR, which compares text.
        let pooled = EnsembleSpec::mbr(vec![EnsembleSpec::leaf("theta_A-1"), EnsembleSpec::leaf("foreign")]);
        assert!(validate_spec(&pooled, &reg2, &params()).is_empty());
    }

    #[test]
    fn identity_reductions() {
        let reg = registry();
        let p = params();
        let leaf = EnsembleSpec::leaf("theta_A-1");
        let base = evaluate_spec(&leaf, &reg, "", &p, 0).unwrap();
        assert_eq!(base, "fever");
        let one = EnsembleSpec::tokens(vec![leaf.clone()]);
        assert_eq!(evaluate_spec(&one, &reg, "", &p, 0).unwrap(), base);
        let mbr1 = EnsembleSpec::mbr(vec![leaf]);
        assert_eq!(evaluate_spec(&mbr1, &reg, "", &p, 0).unwrap(), base);
    }

    #[test]
    fn mbr_picks_from_children() {
        let reg = registry();
        let spec = EnsembleSpec::mbr(vec![
            EnsembleSpec::leaf("theta_A-1"),
            EnsembleSpec::leaf("theta_AS-1"),
            EnsembleSpec::leaf("theta_A-2"),
        ]);
        assert_eq!(evaluate_spec(&spec, &reg, "", &params(), 0).unwrap(), "sepsis");
        // Token ensemble of fever/sepsis: 0.35 each, EOS 0.3.
        let pair = EnsembleSpec::tokens_of(["theta_A-1", "theta_AS-1"]);
        let out = evaluate_spec(&pair, &reg, "", &params(), 0).unwrap();
        assert_eq!(out, "fever");
    }

    #[test]
    fn invalid_spec_is_reported_not_panicked() {
        let reg = registry();
        let err = evaluate_spec(&EnsembleSpec::leaf("missing"), &reg, "", &params(), 0).unwrap_err();
        assert!(matches!(err, HesmError::Invalid(_)));
    }

    #[test]
    fn descriptions() {
        let three_three = EnsembleSpec::tokens_of([
            "theta_A-1", "theta_A-2", "theta_A-3", "theta_AS-1", "theta_AS-2", "theta_AS-3",
        ]);
        assert_eq!(describe_spec(&three_three), "(3, 3)");
        let pairs: Vec<_> = (1..=9)
            .map(|i| EnsembleSpec::tokens_of([format!("theta_A-{i}"), format!("theta_AS-{i}")]))
            .collect();
        assert_eq!(describe_spec(&EnsembleSpec::mbr(pairs)), "(1, 1) / MBR=9");
        assert_eq!(describe_spec(&EnsembleSpec::leaf("theta_A-4")), "theta_A-4");
        let mixed = EnsembleSpec::tokens_of(["theta_A-v2-1", "theta_A-1"]);
        assert_eq!(describe_spec(&mixed), "TokEns[theta_A-v2-1, theta_A-1]");
    }

    #[test]
    fn registry_directory_round_trip() {
        let reg = registry();
        let dir = tempfile::tempdir().unwrap();
        reg.save_dir(dir.path()).unwrap();
        let back = ModelRegistry::load_dir(dir.path()).unwrap();
        assert_eq!(back.ids().collect::<Vec<_>>(), reg.ids().collect::<Vec<_>>());
        for (id, m) in reg.iter() {
            assert_eq!(back.get(id).unwrap().to_json(), m.to_json());
        }
        let mut dup = reg.clone();
        assert!(matches!(
            dup.insert("theta_A-1", TableModel::new(Arc::new(Vocab::from_words(["a"])), Distribution::one_hot(7, EOS)).unwrap()),
            Err(HesmError::DuplicateModel(_))
        ));
    }
}
