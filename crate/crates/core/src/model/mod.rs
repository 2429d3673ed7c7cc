//! Conditional sequence models `p(y_i | x, y_<i)`.
//!
//! Every decoder and ensembler in the crate consumes models only through
//! [`SequenceModel`]. Two concrete models live here: [`TableModel`], a
//! lookup table used for exhaustive tests, and [`CopyMixModel`], a trainable
//! copy/n-gram mixture that stands in for a fine-tuned summarizer.

mod copymix;
mod distribution;
mod io;
mod loss;
mod table;
mod vocab;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use copymix::{train_copymix, train_copymix_with_vocab, CopyMixConfig, CopyMixModel};
pub use distribution::Distribution;
pub use io::{load_model, save_model, AnyModel, MODEL_FORMAT, MODEL_FORMAT_VERSION};
pub use loss::{combined_loss, rl_loss, rl_loss_from_rewards, RlLossInputs, DEFAULT_GAMMA};
pub use table::{TableFixture, TableModel};
pub use vocab::{TokenId, Vocab, BOS, EOS, FIRST_WORD, RESERVED_TOKENS, SEP_A_ID, SEP_O_ID, SEP_S_ID, UNK};

/// Log-probability of an impossible event.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("token id {id} is outside the vocabulary of size {size}")]
    OutOfVocabulary { id: TokenId, size: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocab(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("copy-weight grid is empty")]
    EmptyLambdaGrid,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sequence does not end with EOS")]
    MissingEos,
    #[error("an ensemble needs at least one member")]
    EmptyEnsemble,
    #[error("models are not structurally identical: {0}")]
    StructuralMismatch(String),
    #[error("invalid loss input: {0}")]
    InvalidLossInput(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("model file I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// A model bound to one input sequence, queried once per decoding step.
pub trait ConditionedModel {
    fn next_distribution(&self, prefix: &[TokenId]) -> Result<Distribution, ModelError>;
}

/// The single interface every decoder and ensembler consumes.
///
/// Implementations must be deterministic and free of interior mutation:
/// the same `(input, prefix)` always yields the same vector.
pub trait SequenceModel: Send + Sync + fmt::Debug {
    fn vocab(&self) -> &Arc<Vocab>;

    /// Prepares per-input state (copy distributions, member bindings, ...).
    /// Rejects out-of-vocabulary input ids.
    fn condition<'a>(
        &'a self,
        input: &'a [TokenId],
    ) -> Result<Box<dyn ConditionedModel + 'a>, ModelError>;

    fn next_distribution(
        &self,
        input: &[TokenId],
        prefix: &[TokenId],
    ) -> Result<Distribution, ModelError> {
        self.condition(input)?.next_distribution(prefix)
    }
}

pub(crate) fn check_ids(ids: &[TokenId], size: usize) -> Result<(), ModelError> {
    match ids.iter().find(|&&id| id as usize >= size) {
        Some(&id) => Err(ModelError::OutOfVocabulary { id, size }),
        None => Ok(()),
    }
}

/// Sum of natural-log step probabilities of `y` given `x`.
///
/// `y` must be non-empty and end with EOS. Returns [`LOG_ZERO`] when any
/// step has probability zero.
pub fn sequence_logprob(
    model: &dyn SequenceModel,
    input: &[TokenId],
    y: &[TokenId],
) -> Result<f64, ModelError> {
    match y.last() {
        None => return Err(ModelError::EmptySequence),
        Some(&last) if last != EOS => return Err(ModelError::MissingEos),
        _ => {}
    }
    check_ids(y, model.vocab().len())?;
    let conditioned = model.condition(input)?;
    let mut total = 0.0;
    for i in 0..y.len() {
        let p = conditioned.next_distribution(&y[..i])?.prob(y[i]);
        if p <= 0.0 {
            return Ok(LOG_ZERO);
        }
        total += p.ln();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_vocab() -> Arc<Vocab> {
        Arc::new(Vocab::from_words(["a", "b"]))
    }

    #[test]
    fn logprob_of_single_eos() {
        let vocab = small_vocab();
        let mut probs = vec![0.0; vocab.len()];
        probs[EOS as usize] = 0.5;
        probs[vocab.id("a").unwrap() as usize] = 0.5;
        let model = TableModel::new(vocab, Distribution::new(probs).unwrap()).unwrap();
        let lp = sequence_logprob(&model, &[], &[EOS]).unwrap();
        assert!((lp - 0.5f64.ln()).abs() < 1e-12);
        assert!((lp + 0.693147).abs() < 1e-6);
    }

    #[test]
    fn logprob_of_certain_path_is_zero() {
        let vocab = small_vocab();
        let a = vocab.id("a").unwrap();
        let mut model = TableModel::new(vocab.clone(), Distribution::one_hot(vocab.len(), EOS)).unwrap();
        model.insert(vec![], Distribution::one_hot(vocab.len(), a)).unwrap();
        model.insert(vec![a], Distribution::one_hot(vocab.len(), a)).unwrap();
        assert_eq!(sequence_logprob(&model, &[], &[a, a, EOS]).unwrap(), 0.0);
    }

    #[test]
    fn logprob_zero_step_is_sentinel() {
        let vocab = small_vocab();
        let b = vocab.id("b").unwrap();
        let model = TableModel::new(vocab.clone(), Distribution::one_hot(vocab.len(), EOS)).unwrap();
        assert_eq!(sequence_logprob(&model, &[], &[b, EOS]).unwrap(), LOG_ZERO);
    }

    #[test]
    fn logprob_rejects_bad_sequences() {
        let vocab = small_vocab();
        let model = TableModel::new(vocab.clone(), Distribution::uniform(vocab.len())).unwrap();
        assert!(matches!(sequence_logprob(&model, &[], &[]), Err(ModelError::EmptySequence)));
        assert!(matches!(sequence_logprob(&model, &[], &[6]), Err(ModelError::MissingEos)));
        assert!(matches!(
            sequence_logprob(&model, &[], &[99, EOS]),
            Err(ModelError::OutOfVocabulary { id: 99, .. })
        ));
    }
}
