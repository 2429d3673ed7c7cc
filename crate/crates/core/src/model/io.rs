//! Versioned JSON model files.
//!
//! ```json
//! {
//!   "format": "hesm-model",
//!   "version": 1,
//!   "model": { "copymix": { "vocab": [...], "order": 2, ..., "ngrams": [...] } }
//! }
//! ```
//!
//! Output is canonical (sorted n-grams, sorted table entries), so
//! `save(load(save(m)))` is byte-identical to `save(m)`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fields::FieldSpec;

use super::{
    ConditionedModel, CopyMixModel, ModelError, SequenceModel, TableFixture, TableModel, TokenId,
    Vocab,
};

pub const MODEL_FORMAT: &str = "hesm-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum AnyModel {
    CopyMix(CopyMixModel),
    Table(TableModel),
}

impl From<CopyMixModel> for AnyModel {
    fn from(m: CopyMixModel) -> Self {
        AnyModel::CopyMix(m)
    }
}

impl From<TableModel> for AnyModel {
    fn from(m: TableModel) -> Self {
        AnyModel::Table(m)
    }
}

impl SequenceModel for AnyModel {
    fn vocab(&self) -> &Arc<Vocab> {
        match self {
            AnyModel::CopyMix(m) => m.vocab(),
            AnyModel::Table(m) => m.vocab(),
        }
    }

    fn condition<'a>(
        &'a self,
        input: &'a [TokenId],
    ) -> Result<Box<dyn ConditionedModel + 'a>, ModelError> {
        match self {
            AnyModel::CopyMix(m) => m.condition(input),
            AnyModel::Table(m) => m.condition(input),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: ModelBody,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModelBody {
    Copymix(CopyMixBody),
    Table(TableFixture),
}

#[derive(Serialize, Deserialize)]
struct CopyMixBody {
    vocab: Vec<String>,
    order: usize,
    smoothing: f64,
    copy_weight: f64,
    eos_share: f64,
    shard_seed: u64,
    input_fields: Option<FieldSpec>,
    ngrams: Vec<NgramCount>,
}

#[derive(Serialize, Deserialize)]
struct NgramCount {
    ids: Vec<TokenId>,
    count: f64,
}

impl AnyModel {
    pub fn to_json(&self) -> String {
        let model = match self {
            AnyModel::CopyMix(m) => ModelBody::Copymix(CopyMixBody {
                vocab: m.vocab().tokens().to_vec(),
                order: m.order(),
                smoothing: m.smoothing(),
                copy_weight: m.copy_weight(),
                eos_share: m.eos_share(),
                shard_seed: m.shard_seed(),
                input_fields: m.input_fields().cloned(),
                ngrams: m
                    .counts()
                    .iter()
                    .map(|(ids, &count)| NgramCount {
                        ids: ids.clone(),
                        count,
                    })
                    .collect(),
            }),
            AnyModel::Table(m) => ModelBody::Table(m.to_fixture()),
        };
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_FORMAT_VERSION,
            model,
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(ModelError::Format(format!(
                "expected format `{MODEL_FORMAT}`, found `{}`",
                file.format
            )));
        }
        if file.version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported version {} (this build reads {MODEL_FORMAT_VERSION})",
                file.version
            )));
        }
        match file.model {
            ModelBody::Copymix(body) => {
                let vocab = Arc::new(Vocab::from_token_list(body.vocab)?);
                let mut counts = std::collections::BTreeMap::new();
                for NgramCount { ids, count } in body.ngrams {
                    if counts.insert(ids, count).is_some() {
                        return Err(ModelError::Format("duplicate n-gram entry".into()));
                    }
                }
                Ok(AnyModel::CopyMix(CopyMixModel::from_parts(
                    vocab,
                    body.order,
                    body.smoothing,
                    body.copy_weight,
                    body.eos_share,
                    body.shard_seed,
                    body.input_fields,
                    counts,
                )?))
            }
            ModelBody::Table(fixture) => Ok(AnyModel::Table(TableModel::from_fixture(&fixture)?)),
        }
    }

    pub fn as_copymix(&self) -> Option<&CopyMixModel> {
        match self {
            AnyModel::CopyMix(m) => Some(m),
            AnyModel::Table(_) => None,
        }
    }
}

pub fn save_model(path: &Path, model: &AnyModel) -> Result<(), ModelError> {
    fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<AnyModel, ModelError> {
    AnyModel::from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{train_copymix, CopyMixConfig, Distribution};

    fn trained() -> CopyMixModel {
        let corpus: Vec<(String, String)> = (0..12)
            .map(|i| (format!("<asm> cough fever {i}"), format!("fever {}", i % 4)))
            .collect();
        let config = CopyMixConfig {
            input_fields: Some(FieldSpec::assessment()),
            ..CopyMixConfig::default()
        };
        train_copymix(&corpus, &config, 11).unwrap()
    }

    #[test]
    fn copymix_round_trip_is_byte_identical() {
        let model = AnyModel::from(trained());
        let text = model.to_json();
        let back = AnyModel::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.as_copymix().unwrap(), model.as_copymix().unwrap());
    }

    #[test]
    fn table_round_trip_is_byte_identical() {
        let vocab = Arc::new(Vocab::from_words(["a"]));
        let mut table = TableModel::new(vocab.clone(), Distribution::uniform(vocab.len())).unwrap();
        table
            .insert(vec![6], Distribution::one_hot(vocab.len(), 1))
            .unwrap();
        let model = AnyModel::from(table);
        let text = model.to_json();
        assert_eq!(AnyModel::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn rejects_foreign_or_future_files() {
        let text = AnyModel::from(trained()).to_json();
        let wrong_format = text.replacen("hesm-model", "other", 1);
        assert!(AnyModel::from_json(&wrong_format).is_err());
        let future = text.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(AnyModel::from_json(&future).is_err());
        assert!(AnyModel::from_json("{").is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let model = AnyModel::from(trained());
        save_model(&path, &model).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.to_json(), model.to_json());
    }
}
