//! Token-level ensembles and parameter averaging.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::model::{
    ConditionedModel, CopyMixModel, Distribution, ModelError, SequenceModel, TokenId, Vocab,
};

/// Averages member next-token distributions in probability space.
///
/// Sums are pairwise in member order (split at the midpoint), so an ensemble
/// of two equal-sized ensembles reproduces the flat ensemble bit for bit.
#[derive(Clone)]
pub struct TokenEnsembleModel {
    members: Vec<Arc<dyn SequenceModel>>,
    vocab: Arc<Vocab>,
}

impl fmt::Debug for TokenEnsembleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TokenEnsembleModel")
            .field("members", &self.members.len())
            .field("vocab", &self.vocab.len())
            .finish()
    }
}

impl TokenEnsembleModel {
    pub fn new(members: Vec<Arc<dyn SequenceModel>>) -> Result<Self, ModelError> {
        let first = members.first().ok_or(ModelError::EmptyEnsemble)?;
        let vocab = first.vocab().clone();
        for (i, m) in members.iter().enumerate().skip(1) {
            if !Arc::ptr_eq(m.vocab(), &vocab) && **m.vocab() != *vocab {
                return Err(ModelError::VocabMismatch(format!(
                    "ensemble member {i} does not share member 0's vocabulary"
                )));
            }
        }
        Ok(Self { members, vocab })
    }

    pub fn members(&self) -> &[Arc<dyn SequenceModel>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `Σ rows` by recursive halving, in index order.
fn pairwise_sum(rows: &[Vec<f64>]) -> Vec<f64> {
    match rows {
        [] => Vec::new(),
        [only] => only.clone(),
        _ => {
            let (left, right) = rows.split_at(rows.len() / 2);
            let mut sum = pairwise_sum(left);
            for (s, r) in sum.iter_mut().zip(pairwise_sum(right)) {
                *s += r;
            }
            sum
        }
    }
}

/// Arithmetic mean of distributions, summed pairwise in the given order.
pub fn mean_distribution(dists: &[Distribution]) -> Result<Distribution, ModelError> {
    let first = dists.first().ok_or(ModelError::EmptyEnsemble)?;
    if dists.iter().any(|d| d.len() != first.len()) {
        return Err(ModelError::VocabMismatch("distributions differ in length".into()));
    }
    if dists.len() == 1 {
        return Ok(first.clone());
    }
    let rows: Vec<Vec<f64>> = dists.iter().map(|d| d.probs().to_vec()).collect();
    let m = dists.len() as f64;
    let mean = pairwise_sum(&rows).into_iter().map(|s| s / m).collect();
    Ok(Distribution::from_vec_unchecked(mean))
}

impl SequenceModel for TokenEnsembleModel {
    fn vocab(&self) -> &Arc<Vocab> {
        &self.vocab
    }

    fn condition<'a>(
        &'a self,
        input: &'a [TokenId],
    ) -> Result<Box<dyn ConditionedModel + 'a>, ModelError> {
        let members = self
            .members
            .iter()
            .map(|m| m.condition(input))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Box::new(ConditionedEnsemble { members }))
    }
}

struct ConditionedEnsemble<'a> {
    members: Vec<Box<dyn ConditionedModel + 'a>>,
}

impl ConditionedModel for ConditionedEnsemble<'_> {
    fn next_distribution(&self, prefix: &[TokenId]) -> Result<Distribution, ModelError> {
        let dists = self
            .members
            .iter()
            .map(|m| m.next_distribution(prefix))
            .collect::<Result<Vec<_>, _>>()?;
        mean_distribution(&dists)
    }
}

/// Element-wise mean of n-gram counts (over the union of keys, absent keys
/// counting 0) and of copy weights. The shard seed is taken from the first
/// model.
pub fn weight_average(models: &[&CopyMixModel]) -> Result<CopyMixModel, ModelError> {
    let first = *models.first().ok_or(ModelError::EmptyEnsemble)?;
    for (i, m) in models.iter().enumerate().skip(1) {
        let mismatch = |what: &str| {
            Err(ModelError::StructuralMismatch(format!(
                "model {i} differs from model 0 in {what}"
            )))
        };
        if **m.vocab() != **first.vocab() {
            return mismatch("vocabulary");
        }
        if m.order() != first.order() {
            return mismatch("n-gram order");
        }
        if m.smoothing() != first.smoothing() {
            return mismatch("smoothing");
        }
        if m.eos_share() != first.eos_share() {
            return mismatch("EOS share");
        }
        if m.input_fields() != first.input_fields() {
            return mismatch("input fields");
        }
    }
    let n = models.len() as f64;
    let mut sums: BTreeMap<Vec<TokenId>, f64> = BTreeMap::new();
    for m in models {
        for (gram, &count) in m.counts() {
            *sums.entry(gram.clone()).or_insert(0.0) += count;
        }
    }
    sums.values_mut().for_each(|c| *c /= n);
    let lambda = models.iter().map(|m| m.copy_weight()).sum::<f64>() / n;
    CopyMixModel::from_parts(
        first.vocab().clone(),
        first.order(),
        first.smoothing(),
        lambda.clamp(0.0, 1.0),
        first.eos_share(),
        first.shard_seed(),
        first.input_fields().cloned(),
        sums,
    )
}
