use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    check_ids, ConditionedModel, Distribution, ModelError, SequenceModel, TokenId, Vocab,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TableKey {
    input: Option<Vec<TokenId>>,
    prefix: Vec<TokenId>,
}

/// Lookup-table model: `(input?, prefix) -> Distribution`, with a default.
///
/// Lookups try the input-specific entry first, then the input-agnostic one,
/// then the default.
#[derive(Debug, Clone)]
pub struct TableModel {
    vocab: Arc<Vocab>,
    entries: HashMap<TableKey, Distribution>,
    default: Distribution,
}

impl TableModel {
    pub fn new(vocab: Arc<Vocab>, default: Distribution) -> Result<Self, ModelError> {
        check_len(&vocab, &default)?;
        Ok(Self {
            vocab,
            entries: HashMap::new(),
            default,
        })
    }

    /// Entry that applies to every input.
    pub fn insert(&mut self, prefix: Vec<TokenId>, dist: Distribution) -> Result<(), ModelError> {
        self.insert_entry(None, prefix, dist)
    }

    pub fn insert_for_input(
        &mut self,
        input: Vec<TokenId>,
        prefix: Vec<TokenId>,
        dist: Distribution,
    ) -> Result<(), ModelError> {
        self.insert_entry(Some(input), prefix, dist)
    }

    fn insert_entry(
        &mut self,
        input: Option<Vec<TokenId>>,
        prefix: Vec<TokenId>,
        dist: Distribution,
    ) -> Result<(), ModelError> {
        check_len(&self.vocab, &dist)?;
        check_ids(&prefix, self.vocab.len())?;
        if let Some(input) = &input {
            check_ids(input, self.vocab.len())?;
        }
        self.entries.insert(TableKey { input, prefix }, dist);
        Ok(())
    }

    pub fn default_distribution(&self) -> &Distribution {
        &self.default
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&self, input: &[TokenId], prefix: &[TokenId]) -> &Distribution {
        let specific = TableKey {
            input: Some(input.to_vec()),
            prefix: prefix.to_vec(),
        };
        if let Some(d) = self.entries.get(&specific) {
            return d;
        }
        let generic = TableKey {
            input: None,
            prefix: specific.prefix,
        };
        self.entries.get(&generic).unwrap_or(&self.default)
    }

    /// Parses the human-writable fixture format.
    pub fn from_fixture(fixture: &TableFixture) -> Result<Self, ModelError> {
        let vocab = Arc::new(Vocab::from_words(&fixture.words));
        let default = fixture.default.resolve(&vocab)?;
        let mut model = TableModel::new(vocab.clone(), default)?;
        for entry in &fixture.entries {
            let prefix = resolve_tokens(&vocab, &entry.prefix)?;
            let dist = entry.probs.resolve(&vocab)?;
            match &entry.input {
                Some(input) => {
                    let input = resolve_tokens(&vocab, input)?;
                    model.insert_for_input(input, prefix, dist)?;
                }
                None => model.insert(prefix, dist)?,
            }
        }
        Ok(model)
    }

    pub fn from_fixture_json(text: &str) -> Result<Self, ModelError> {
        let fixture: TableFixture =
            serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
        Self::from_fixture(&fixture)
    }

    /// Canonical fixture: dense probability lists, entries sorted by key.
    pub fn to_fixture(&self) -> TableFixture {
        let token_names = |ids: &[TokenId]| -> Vec<String> {
            ids.iter()
                .map(|&id| self.vocab.token(id).unwrap_or("<unk>").to_string())
                .collect()
        };
        let sorted: BTreeMap<&TableKey, &Distribution> = self.entries.iter().collect();
        TableFixture {
            words: self.vocab.tokens()[super::FIRST_WORD as usize..].to_vec(),
            default: ProbSpec::Dense(self.default.probs().to_vec()),
            entries: sorted
                .into_iter()
                .map(|(key, dist)| TableEntry {
                    input: key.input.as_deref().map(token_names),
                    prefix: token_names(&key.prefix),
                    probs: ProbSpec::Dense(dist.probs().to_vec()),
                })
                .collect(),
        }
    }
}

fn check_len(vocab: &Vocab, dist: &Distribution) -> Result<(), ModelError> {
    if dist.len() != vocab.len() {
        return Err(ModelError::VocabMismatch(format!(
            "distribution has {} entries, vocabulary has {}",
            dist.len(),
            vocab.len()
        )));
    }
    Ok(())
}

fn resolve_tokens(vocab: &Vocab, tokens: &[String]) -> Result<Vec<TokenId>, ModelError> {
    tokens
        .iter()
        .map(|t| {
            vocab
                .id(t)
                .ok_or_else(|| ModelError::Format(format!("unknown token `{t}` in fixture")))
        })
        .collect()
}

impl SequenceModel for TableModel {
    fn vocab(&self) -> &Arc<Vocab> {
        &self.vocab
    }

    fn condition<'a>(
        &'a self,
        input: &'a [TokenId],
    ) -> Result<Box<dyn ConditionedModel + 'a>, ModelError> {
        check_ids(input, self.vocab.len())?;
        Ok(Box::new(ConditionedTable { model: self, input }))
    }
}

struct ConditionedTable<'a> {
    model: &'a TableModel,
    input: &'a [TokenId],
}

impl ConditionedModel for ConditionedTable<'_> {
    fn next_distribution(&self, prefix: &[TokenId]) -> Result<Distribution, ModelError> {
        check_ids(prefix, self.model.vocab.len())?;
        Ok(self.model.lookup(self.input, prefix).clone())
    }
}

/// Human-writable table description.
///
/// ```json
/// {
///   "words": ["a", "b"],
///   "default": {"</s>": 1.0},
///   "entries": [
///     {"prefix": [], "probs": {"a": 0.6, "</s>": 0.4}},
///     {"input": ["b"], "prefix": ["a"], "probs": [0, 1, 0, 0, 0, 0, 0, 0]}
///   ]
/// }
/// ```
///
/// Probabilities are either a dense list in id order (reserved tokens
/// first) or a sparse map from token to probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFixture {
    pub words: Vec<String>,
    pub default: ProbSpec,
    #[serde(default)]
    pub entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<String>>,
    pub prefix: Vec<String>,
    pub probs: ProbSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbSpec {
    Dense(Vec<f64>),
    Sparse(BTreeMap<String, f64>),
}

impl ProbSpec {
    fn resolve(&self, vocab: &Vocab) -> Result<Distribution, ModelError> {
        match self {
            ProbSpec::Dense(p) => Distribution::new(p.clone()),
            ProbSpec::Sparse(map) => {
                let mut probs = vec![0.0; vocab.len()];
                for (token, &p) in map {
                    let id = vocab.id(token).ok_or_else(|| {
                        ModelError::Format(format!("unknown token `{token}` in fixture"))
                    })?;
                    probs[id as usize] = p;
                }
                Distribution::new(probs)
            }
        }
    }
}
