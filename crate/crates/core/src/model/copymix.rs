//! Copy/n-gram mixture summarizer.
//!
//! `p(w) = λ·copy(x)(w) + (1 − λ)·ngram(prefix)(w)`
//!
//! The copy component spreads `1 − ε` uniformly over the multiset of content
//! words of the input (restricted to the model's input fields) and puts `ε`
//! on EOS. The n-gram component is stupid backoff (weight 0.4) from order K
//! down to an add-α unigram floor, normalized over the vocabulary.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fields::{Field, FieldSpec};

use super::{
    check_ids, sequence_logprob, ConditionedModel, Distribution, ModelError, SequenceModel,
    TokenId, Vocab, BOS, EOS, SEP_A_ID, SEP_O_ID, SEP_S_ID,
};

pub const BACKOFF_WEIGHT: f64 = 0.4;
/// Share of the corpus used for counting; the rest selects λ.
pub const TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyMixConfig {
    /// Highest n-gram order K.
    pub order: usize,
    /// Add-α constant at the unigram floor.
    pub smoothing: f64,
    /// Candidate copy weights, tried in order; ties keep the earliest.
    pub lambda_grid: Vec<f64>,
    /// EOS share ε of the copy distribution.
    pub eos_share: f64,
    /// Sections the copy component reads; `None` reads the whole input.
    pub input_fields: Option<FieldSpec>,
}

impl Default for CopyMixConfig {
    fn default() -> Self {
        Self {
            order: 2,
            smoothing: 0.1,
            lambda_grid: vec![0.2, 0.4, 0.6, 0.8],
            eos_share: 0.1,
            input_fields: None,
        }
    }
}

impl CopyMixConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        validate_structure(self.order, self.smoothing, self.eos_share)?;
        if self.lambda_grid.is_empty() {
            return Err(ModelError::EmptyLambdaGrid);
        }
        for &l in &self.lambda_grid {
            validate_copy_weight(l)?;
        }
        Ok(())
    }
}

fn validate_structure(order: usize, smoothing: f64, eos_share: f64) -> Result<(), ModelError> {
    if order == 0 {
        return Err(ModelError::InvalidConfig("n-gram order must be >= 1".into()));
    }
    if !(smoothing.is_finite() && smoothing > 0.0) {
        return Err(ModelError::InvalidConfig(format!(
            "smoothing must be > 0, got {smoothing}"
        )));
    }
    if !(0.0..=1.0).contains(&eos_share) {
        return Err(ModelError::InvalidConfig(format!(
            "EOS share must be in [0, 1], got {eos_share}"
        )));
    }
    Ok(())
}

fn validate_copy_weight(lambda: f64) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ModelError::InvalidConfig(format!(
            "copy weight must be in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
struct Successors {
    total: f64,
    next: Vec<(TokenId, f64)>,
}

/// Derived lookup structure; rebuilt from the counts, never serialized.
#[derive(Debug, Clone)]
struct NgramIndex {
    unigram_floor: Vec<f64>,
    successors: HashMap<Vec<TokenId>, Successors>,
}

impl NgramIndex {
    fn build(counts: &BTreeMap<Vec<TokenId>, f64>, vocab_size: usize, smoothing: f64) -> Self {
        let mut unigram = vec![0.0; vocab_size];
        let mut successors: HashMap<Vec<TokenId>, Successors> = HashMap::new();
        for (gram, &count) in counts {
            let (last, history) = gram.split_last().expect("n-grams are non-empty");
            if history.is_empty() {
                unigram[*last as usize] += count;
            } else if count > 0.0 {
                let entry = successors.entry(history.to_vec()).or_default();
                entry.total += count;
                entry.next.push((*last, count));
            }
        }
        let total: f64 = unigram.iter().sum();
        let denom = total + smoothing * vocab_size as f64;
        let unigram_floor = unigram.iter().map(|c| (c + smoothing) / denom).collect();
        Self {
            unigram_floor,
            successors,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CopyMixModel {
    vocab: Arc<Vocab>,
    order: usize,
    smoothing: f64,
    copy_weight: f64,
    eos_share: f64,
    shard_seed: u64,
    input_fields: Option<FieldSpec>,
    counts: BTreeMap<Vec<TokenId>, f64>,
    index: NgramIndex,
}

impl PartialEq for CopyMixModel {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.order == other.order
            && self.smoothing == other.smoothing
            && self.copy_weight == other.copy_weight
            && self.eos_share == other.eos_share
            && self.shard_seed == other.shard_seed
            && self.input_fields == other.input_fields
            && self.counts == other.counts
    }
}

impl CopyMixModel {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        vocab: Arc<Vocab>,
        order: usize,
        smoothing: f64,
        copy_weight: f64,
        eos_share: f64,
        shard_seed: u64,
        input_fields: Option<FieldSpec>,
        counts: BTreeMap<Vec<TokenId>, f64>,
    ) -> Result<Self, ModelError> {
        validate_structure(order, smoothing, eos_share)?;
        validate_copy_weight(copy_weight)?;
        for (gram, &count) in &counts {
            if gram.is_empty() || gram.len() > order {
                return Err(ModelError::InvalidConfig(format!(
                    "n-gram of length {} in an order-{order} model",
                    gram.len()
                )));
            }
            check_ids(gram, vocab.len())?;
            if !(count.is_finite() && count >= 0.0) {
                return Err(ModelError::InvalidConfig(format!("negative count {count}")));
            }
        }
        let index = NgramIndex::build(&counts, vocab.len(), smoothing);
        Ok(Self {
            vocab,
            order,
            smoothing,
            copy_weight,
            eos_share,
            shard_seed,
            input_fields,
            counts,
            index,
        })
    }

    /// A model with no counts: its n-gram part is uniform.
    pub fn untrained(vocab: Arc<Vocab>, config: &CopyMixConfig, copy_weight: f64) -> Result<Self, ModelError> {
        Self::from_parts(
            vocab,
            config.order,
            config.smoothing,
            copy_weight,
            config.eos_share,
            0,
            config.input_fields.clone(),
            BTreeMap::new(),
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn copy_weight(&self) -> f64 {
        self.copy_weight
    }

    pub fn eos_share(&self) -> f64 {
        self.eos_share
    }

    pub fn shard_seed(&self) -> u64 {
        self.shard_seed
    }

    pub fn input_fields(&self) -> Option<&FieldSpec> {
        self.input_fields.as_ref()
    }

    pub fn counts(&self) -> &BTreeMap<Vec<TokenId>, f64> {
        &self.counts
    }

    /// Same counts, different λ.
    pub fn with_copy_weight(&self, copy_weight: f64) -> Result<Self, ModelError> {
        validate_copy_weight(copy_weight)?;
        let mut model = self.clone();
        model.copy_weight = copy_weight;
        Ok(model)
    }

    /// Content words of `input` visible to this model.
    ///
    /// Tokens before the first separator always count; after a separator,
    /// only sections listed in `input_fields` do.
    pub fn visible_content<'a>(&'a self, input: &'a [TokenId]) -> impl Iterator<Item = TokenId> + 'a {
        let mut section: Option<Field> = None;
        input.iter().filter_map(move |&id| {
            match id {
                SEP_A_ID => section = Some(Field::A),
                SEP_S_ID => section = Some(Field::S),
                SEP_O_ID => section = Some(Field::O),
                _ if Vocab::is_word(id) => {
                    let visible = match (&self.input_fields, section) {
                        (Some(fields), Some(current)) => fields.contains(current),
                        _ => true,
                    };
                    if visible {
                        return Some(id);
                    }
                }
                _ => {}
            }
            None
        })
    }

    fn copy_distribution(&self, input: &[TokenId]) -> Vec<f64> {
        let mut copy = vec![0.0; self.vocab.len()];
        let mut n = 0usize;
        for id in self.visible_content(input) {
            copy[id as usize] += 1.0;
            n += 1;
        }
        if n == 0 {
            copy[EOS as usize] = 1.0;
            return copy;
        }
        let share = (1.0 - self.eos_share) / n as f64;
        for p in copy.iter_mut() {
            *p *= share;
        }
        copy[EOS as usize] += self.eos_share;
        copy
    }

    fn ngram_distribution(&self, prefix: &[TokenId]) -> Vec<f64> {
        let k = self.order;
        let mut scores: Vec<f64> = {
            let w = BACKOFF_WEIGHT.powi(k as i32 - 1);
            self.index.unigram_floor.iter().map(|p| w * p).collect()
        };
        if k > 1 {
            // Last K-1 tokens of BOS + prefix.
            let take = (k - 1).min(prefix.len() + 1);
            let mut context: Vec<TokenId> = Vec::with_capacity(take);
            if take > prefix.len() {
                context.push(BOS);
                context.extend_from_slice(prefix);
            } else {
                context.extend_from_slice(&prefix[prefix.len() - take..]);
            }
            for o in 2..=k {
                let h = o - 1;
                if h > context.len() {
                    break;
                }
                let history = &context[context.len() - h..];
                if let Some(succ) = self.index.successors.get(history) {
                    if succ.total > 0.0 {
                        let w = BACKOFF_WEIGHT.powi((k - o) as i32);
                        for &(t, c) in &succ.next {
                            scores[t as usize] = w * c / succ.total;
                        }
                    }
                }
            }
        }
        let total: f64 = scores.iter().sum();
        scores.iter_mut().for_each(|s| *s /= total);
        scores
    }
}

impl SequenceModel for CopyMixModel {
    fn vocab(&self) -> &Arc<Vocab> {
        &self.vocab
    }

    fn condition<'a>(
        &'a self,
        input: &'a [TokenId],
    ) -> Result<Box<dyn ConditionedModel + 'a>, ModelError> {
        check_ids(input, self.vocab.len())?;
        let copy = if self.copy_weight > 0.0 {
            self.copy_distribution(input)
        } else {
            Vec::new()
        };
        Ok(Box::new(ConditionedCopyMix { model: self, copy }))
    }
}

struct ConditionedCopyMix<'a> {
    model: &'a CopyMixModel,
    copy: Vec<f64>,
}

impl ConditionedModel for ConditionedCopyMix<'_> {
    fn next_distribution(&self, prefix: &[TokenId]) -> Result<Distribution, ModelError> {
        let model = self.model;
        check_ids(prefix, model.vocab.len())?;
        let lambda = model.copy_weight;
        if lambda == 1.0 {
            return Ok(Distribution::from_vec_unchecked(self.copy.clone()));
        }
        let mut probs = model.ngram_distribution(prefix);
        if lambda > 0.0 {
            for (p, c) in probs.iter_mut().zip(&self.copy) {
                *p = lambda * c + (1.0 - lambda) * *p;
            }
        }
        Ok(Distribution::from_vec_unchecked(probs))
    }
}

/// Trains with a vocabulary built from every text of the corpus.
pub fn train_copymix(
    corpus: &[(String, String)],
    config: &CopyMixConfig,
    shard_seed: u64,
) -> Result<CopyMixModel, ModelError> {
    let vocab = Vocab::from_texts(
        corpus
            .iter()
            .flat_map(|(x, y)| [x.as_str(), y.as_str()]),
    );
    train_copymix_with_vocab(corpus, Arc::new(vocab), config, shard_seed)
}

/// Counts n-grams on a seeded 80% shard of the corpus and picks λ from the
/// grid by log-likelihood of the held-out 20% (the shard itself when the
/// held-out part is empty).
pub fn train_copymix_with_vocab(
    corpus: &[(String, String)],
    vocab: Arc<Vocab>,
    config: &CopyMixConfig,
    shard_seed: u64,
) -> Result<CopyMixModel, ModelError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let encoded: Vec<(Vec<TokenId>, Vec<TokenId>)> = corpus
        .iter()
        .map(|(x, y)| (vocab.encode(x), vocab.encode(y)))
        .collect();

    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(shard_seed);
    order.shuffle(&mut rng);
    let n_train = ((encoded.len() as f64 * TRAIN_FRACTION).ceil() as usize).clamp(1, encoded.len());
    let (train_idx, heldout_idx) = order.split_at(n_train);

    let mut counts: BTreeMap<Vec<TokenId>, f64> = BTreeMap::new();
    for &i in train_idx {
        let summary = &encoded[i].1;
        let mut seq = Vec::with_capacity(summary.len() + 2);
        seq.push(BOS);
        seq.extend_from_slice(summary);
        seq.push(EOS);
        for end in 1..seq.len() {
            for n in 1..=config.order.min(end + 1) {
                *counts.entry(seq[end + 1 - n..=end].to_vec()).or_insert(0.0) += 1.0;
            }
        }
    }

    let base = CopyMixModel::from_parts(
        vocab,
        config.order,
        config.smoothing,
        config.lambda_grid[0],
        config.eos_share,
        shard_seed,
        config.input_fields.clone(),
        counts,
    )?;

    let selection = if heldout_idx.is_empty() { train_idx } else { heldout_idx };
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &config.lambda_grid {
        let candidate = base.with_copy_weight(lambda)?;
        let mut ll = 0.0;
        for &i in selection {
            let (x, y) = &encoded[i];
            let mut target = y.clone();
            target.push(EOS);
            ll += sequence_logprob(&candidate, x, &target)?;
        }
        if best.is_none_or(|(best_ll, _)| ll > best_ll) {
            best = Some((ll, lambda));
        }
    }
    let (_, lambda) = best.expect("grid is non-empty");
    base.with_copy_weight(lambda)
}
