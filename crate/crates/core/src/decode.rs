//! Constrained decoding: beam search, greedy search and ancestral sampling.
//!
//! All three decoders read the same per-step distribution: the model's
//! `next_distribution`, passed through [`apply_constraints`], and replaced by
//! a point mass on EOS once the prefix holds `max_length − 1` tokens. Lengths
//! count generated tokens including the final EOS; BOS is implicit.
//!
//! Ties are broken on the lexicographically smaller id sequence everywhere.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConditionedModel, Distribution, ModelError, SequenceModel, TokenId, EOS};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("invalid decoding parameters: {0}")]
    InvalidParams(String),
    #[error("length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeParams {
    pub num_beams: usize,
    pub length_penalty: f64,
    pub min_length: usize,
    pub max_length: usize,
    /// 0 disables the constraint.
    pub no_repeat_ngram_size: usize,
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self {
            num_beams: 4,
            length_penalty: 0.6,
            min_length: 5,
            max_length: 256,
            no_repeat_ngram_size: 4,
        }
    }
}

impl DecodeParams {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.num_beams == 0 {
            return Err(DecodeError::InvalidParams("num_beams must be >= 1".into()));
        }
        if self.max_length == 0 {
            return Err(DecodeError::InvalidParams("max_length must be >= 1".into()));
        }
        if self.min_length > self.max_length {
            return Err(DecodeError::InvalidParams(format!(
                "min_length {} exceeds max_length {}",
                self.min_length, self.max_length
            )));
        }
        if !(self.length_penalty.is_finite() && self.length_penalty >= 0.0) {
            return Err(DecodeError::InvalidParams(format!(
                "length_penalty must be finite and >= 0, got {}",
                self.length_penalty
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub ids: Vec<TokenId>,
    pub logprob: f64,
    pub finished: bool,
}

impl Hypothesis {
    pub fn penalized_score(&self, alpha: f64) -> f64 {
        length_penalized_score(self.logprob, self.ids.len(), alpha)
            .expect("finished hypotheses are non-empty")
    }
}

/// `logprob / length^α`.
pub fn length_penalized_score(logprob: f64, length: usize, alpha: f64) -> Result<f64, DecodeError> {
    if length == 0 {
        return Err(DecodeError::ZeroLength);
    }
    if alpha == 0.0 {
        return Ok(logprob);
    }
    Ok(logprob / (length as f64).powf(alpha))
}

/// Tokens that would complete an n-gram already present in `prefix`.
fn banned_by_repeats(prefix: &[TokenId], n: usize) -> Vec<TokenId> {
    if n == 0 || prefix.len() + 1 < n {
        return Vec::new();
    }
    let tail = &prefix[prefix.len() + 1 - n..];
    let mut banned: Vec<TokenId> = prefix
        .windows(n)
        .filter(|w| &w[..n - 1] == tail)
        .map(|w| w[n - 1])
        .collect();
    banned.sort_unstable();
    banned.dedup();
    banned
}

/// Zeroes tokens that would repeat an n-gram of size `no_repeat_ngram_size`
/// and EOS while the prefix is shorter than `min_length`, then renormalizes.
///
/// When nothing with positive mass is removed the input comes back unchanged.
/// When all mass is removed, EOS is forced, or the lowest-id allowed token if
/// EOS itself is banned.
pub fn apply_constraints(prefix: &[TokenId], dist: &Distribution, params: &DecodeParams) -> Distribution {
    let mut banned = banned_by_repeats(prefix, params.no_repeat_ngram_size);
    let eos_banned = prefix.len() < params.min_length;
    if eos_banned {
        banned.push(EOS);
    }
    let removes_mass = banned.iter().any(|&t| dist.prob(t) > 0.0);
    if !removes_mass {
        return dist.clone();
    }
    let mut probs = dist.probs().to_vec();
    let mut is_banned = vec![false; probs.len()];
    for &t in &banned {
        if let Some(p) = probs.get_mut(t as usize) {
            *p = 0.0;
            is_banned[t as usize] = true;
        }
    }
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        probs.iter_mut().for_each(|p| *p /= total);
        return Distribution::new(probs).expect("renormalized mass is valid");
    }
    let fallback = if !eos_banned {
        EOS
    } else {
        is_banned
            .iter()
            .position(|b| !b)
            .map(|i| i as TokenId)
            .unwrap_or(EOS)
    };
    Distribution::one_hot(probs.len(), fallback)
}

/// The distribution every decoder samples from at this prefix.
pub fn step_distribution(
    model: &dyn ConditionedModel,
    vocab_size: usize,
    prefix: &[TokenId],
    params: &DecodeParams,
) -> Result<Distribution, DecodeError> {
    if prefix.len() + 1 >= params.max_length {
        return Ok(Distribution::one_hot(vocab_size, EOS));
    }
    let raw = model.next_distribution(prefix)?;
    Ok(apply_constraints(prefix, &raw, params))
}

fn rank_finished(a: &(f64, Hypothesis), b: &(f64, Hypothesis)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.ids.cmp(&b.1.ids))
}

struct Candidate {
    logprob: f64,
    parent: usize,
    token: TokenId,
}

/// Beam search from BOS.
///
/// Each step expands every live beam with every token of positive
/// probability and keeps the `num_beams` best extensions by cumulative
/// log-probability; extensions ending in EOS move to the finished pool.
/// Stops when no live beam can beat the `num_beams`-th finished score (the
/// bound uses `max_length` as the most favourable final length) or when the
/// live set empties. Returns up to `num_beams` hypotheses ranked by
/// length-penalized score.
pub fn beam_search(
    model: &dyn SequenceModel,
    input: &[TokenId],
    params: &DecodeParams,
) -> Result<Vec<Hypothesis>, DecodeError> {
    params.validate()?;
    let vocab_size = model.vocab().len();
    let conditioned = model.condition(input)?;
    let k = params.num_beams;
    let alpha = params.length_penalty;

    let mut live: Vec<(Vec<TokenId>, f64)> = vec![(Vec::new(), 0.0)];
    let mut finished: Vec<(f64, Hypothesis)> = Vec::new();

    while !live.is_empty() {
        let mut candidates: Vec<Candidate> = Vec::new();
        for (parent, (ids, logprob)) in live.iter().enumerate() {
            let dist = step_distribution(conditioned.as_ref(), vocab_size, ids, params)?;
            for (token, &p) in dist.probs().iter().enumerate() {
                if p > 0.0 {
                    candidates.push(Candidate {
                        logprob: logprob + p.ln(),
                        parent,
                        token: token as TokenId,
                    });
                }
            }
        }
        // Live beams share one length, so comparing parent ids then the new
        // token is the lexicographic order on the extended sequences.
        let order = |a: &Candidate, b: &Candidate| {
            b.logprob
                .total_cmp(&a.logprob)
                .then_with(|| live[a.parent].0.cmp(&live[b.parent].0))
                .then_with(|| a.token.cmp(&b.token))
        };
        if candidates.len() > k {
            candidates.select_nth_unstable_by(k - 1, order);
            candidates.truncate(k);
        }
        candidates.sort_by(order);

        let mut next_live = Vec::with_capacity(candidates.len());
        for c in candidates {
            let mut ids = live[c.parent].0.clone();
            ids.push(c.token);
            if c.token == EOS {
                let hyp = Hypothesis {
                    logprob: c.logprob,
                    finished: true,
                    ids,
                };
                finished.push((hyp.penalized_score(alpha), hyp));
            } else {
                next_live.push((ids, c.logprob));
            }
        }
        finished.sort_by(rank_finished);
        finished.truncate(k);
        live = next_live;

        if finished.len() >= k {
            let worst_kept = finished[k - 1].0;
            let best_possible = live
                .iter()
                .map(|(_, lp)| length_penalized_score(*lp, params.max_length, alpha))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            if best_possible < worst_kept {
                break;
            }
        }
    }
    Ok(finished.into_iter().map(|(_, h)| h).collect())
}

/// Highest-probability token at each step; lowest id on ties.
pub fn greedy_search(
    model: &dyn SequenceModel,
    input: &[TokenId],
    params: &DecodeParams,
) -> Result<Hypothesis, DecodeError> {
    params.validate()?;
    let vocab_size = model.vocab().len();
    let conditioned = model.condition(input)?;
    let mut ids = Vec::new();
    let mut logprob = 0.0;
    loop {
        let dist = step_distribution(conditioned.as_ref(), vocab_size, &ids, params)?;
        // Compare cumulative scores the way beam search does, so width-1
        // beam search and greedy agree bit for bit.
        let mut best: Option<(f64, TokenId)> = None;
        for (token, &p) in dist.probs().iter().enumerate() {
            if p > 0.0 {
                let score = logprob + p.ln();
                if best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, token as TokenId));
                }
            }
        }
        let (score, token) = best.expect("step distributions carry positive mass");
        logprob = score;
        ids.push(token);
        if token == EOS {
            return Ok(Hypothesis {
                ids,
                logprob,
                finished: true,
            });
        }
    }
}

/// Ancestral sampling with ChaCha8 keyed by `seed`.
///
/// Each step draws one `f64` in `[0, 1)` and walks the cumulative mass in
/// id order, so results are identical on every platform.
pub fn sample_sequence(
    model: &dyn SequenceModel,
    input: &[TokenId],
    params: &DecodeParams,
    seed: u64,
) -> Result<Hypothesis, DecodeError> {
    params.validate()?;
    let vocab_size = model.vocab().len();
    let conditioned = model.condition(input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids = Vec::new();
    let mut logprob = 0.0;
    loop {
        let dist = step_distribution(conditioned.as_ref(), vocab_size, &ids, params)?;
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (token, &p) in dist.probs().iter().enumerate() {
            if p > 0.0 {
                cumulative += p;
                chosen = Some(token);
                if u < cumulative {
                    break;
                }
            }
        }
        let token = chosen.expect("step distributions carry positive mass");
        logprob += dist.probs()[token].ln();
        ids.push(token as TokenId);
        if token as TokenId == EOS {
            return Ok(Hypothesis {
                ids,
                logprob,
                finished: true,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TableModel, Vocab, FIRST_WORD};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn vocab_ab() -> Arc<Vocab> {
        Arc::new(Vocab::from_words(["a", "b"]))
    }

    fn dist(v: &Vocab, entries: &[(TokenId, f64)]) -> Distribution {
        let mut p = vec![0.0; v.len()];
        for &(t, q) in entries {
            p[t as usize] = q;
        }
        Distribution::new(p).unwrap()
    }

    fn loose() -> DecodeParams {
        DecodeParams {
            num_beams: 4,
            length_penalty: 0.0,
            min_length: 0,
            max_length: 10,
            no_repeat_ngram_size: 0,
        }
    }

    #[test]
    fn length_penalty_examples() {
        let s = length_penalized_score(-2.0, 4, 0.6).unwrap();
        assert!((s - (-2.0 / 4f64.powf(0.6))).abs() < 1e-15);
        assert!((s + 0.870551).abs() < 1e-6);
        assert_eq!(length_penalized_score(-1.25, 7, 0.0).unwrap(), -1.25);
        assert_eq!(length_penalized_score(-3.0, 1, 0.6).unwrap(), -3.0);
        assert!(matches!(length_penalized_score(-1.0, 0, 0.6), Err(DecodeError::ZeroLength)));
    }

    #[test]
    fn params_defaults_and_validation() {
        let d = DecodeParams::default();
        assert_eq!(
            (d.num_beams, d.length_penalty, d.min_length, d.max_length, d.no_repeat_ngram_size),
            (4, 0.6, 5, 256, 4)
        );
        assert!(d.validate().is_ok());
        assert!(DecodeParams { num_beams: 0, ..d }.validate().is_err());
        assert!(DecodeParams { max_length: 0, min_length: 0, ..d }.validate().is_err());
        assert!(DecodeParams { min_length: 300, ..d }.validate().is_err());
        assert!(DecodeParams { length_penalty: -1.0, ..d }.validate().is_err());
    }

    #[test]
    fn no_repeat_on_periodic_prefix() {
        let v = Vocab::from_words(["a", "b", "c"]);
        let (a, b, c) = (6, 7, 8);
        let d = Distribution::uniform(v.len());
        let prefix = [a, b, c, a, b, c];
        let params = DecodeParams { no_repeat_ngram_size: 4, ..loose() };
        // No 4-gram occurs twice in the prefix, but appending `a` would
        // complete "a b c a" a second time, so only `a` is removed.
        let masked = apply_constraints(&prefix, &d, &params);
        assert_eq!(masked.prob(a), 0.0);
        for t in (0..v.len() as TokenId).filter(|&t| t != a) {
            assert!((masked.prob(t) - 1.0 / 8.0).abs() < 1e-15);
        }
        // A fresh prefix with no matching (n−1)-suffix is left untouched.
        assert_eq!(apply_constraints(&[a, b, c, b], &d, &params), d);
        let params3 = DecodeParams { no_repeat_ngram_size: 3, ..loose() };
        assert_eq!(apply_constraints(&prefix, &d, &params3).prob(a), 0.0);
        assert!(apply_constraints(&prefix, &d, &params3).prob(b) > 0.0);
    }

    #[test]
    fn min_length_masks_eos() {
        let v = vocab_ab();
        let d = dist(&v, &[(EOS, 0.5), (6, 0.5)]);
        let params = DecodeParams { min_length: 3, ..loose() };
        let masked = apply_constraints(&[6], &d, &params);
        assert_eq!(masked.prob(EOS), 0.0);
        assert_eq!(masked.prob(6), 1.0);
        assert_eq!(apply_constraints(&[6, 6, 6], &d, &params), d);
    }

    #[test]
    fn disabled_constraints_are_identity() {
        let v = vocab_ab();
        let d = dist(&v, &[(EOS, 0.3), (6, 0.3), (7, 0.4)]);
        let out = apply_constraints(&[6, 6, 6, 6, 6], &d, &loose());
        assert_eq!(out, d);
    }

    #[test]
    fn fallbacks_when_all_mass_removed() {
        let v = vocab_ab();
        let only_eos = dist(&v, &[(EOS, 1.0)]);
        let params = DecodeParams { min_length: 2, ..loose() };
        // EOS banned and it carried all the mass: lowest allowed id (BOS=0).
        let out = apply_constraints(&[], &only_eos, &params);
        assert_eq!(out.prob(0), 1.0);
        // A repeat ban removes everything: EOS is forced.
        let only_a = dist(&v, &[(6, 1.0)]);
        let params = DecodeParams { no_repeat_ngram_size: 1, ..loose() };
        let out = apply_constraints(&[6], &only_a, &params);
        assert_eq!(out.prob(EOS), 1.0);
    }

    fn chain_model() -> TableModel {
        // Deterministic: a a b EOS.
        let v = vocab_ab();
        let mut m = TableModel::new(v.clone(), Distribution::one_hot(v.len(), EOS)).unwrap();
        m.insert(vec![], Distribution::one_hot(v.len(), 6)).unwrap();
        m.insert(vec![6], Distribution::one_hot(v.len(), 6)).unwrap();
        m.insert(vec![6, 6], Distribution::one_hot(v.len(), 7)).unwrap();
        m
    }

    #[test]
    fn single_path_model() {
        let m = chain_model();
        let params = DecodeParams { length_penalty: 0.6, ..loose() };
        let beams = beam_search(&m, &[], &params).unwrap();
        assert_eq!(beams.len(), 1);
        assert_eq!(beams[0].ids, vec![6, 6, 7, EOS]);
        assert_eq!(beams[0].logprob, 0.0);
        assert_eq!(beams[0].penalized_score(0.6), 0.0);
        let g = greedy_search(&m, &[], &params).unwrap();
        assert_eq!(g, beams[0]);
        for seed in 0..5 {
            assert_eq!(sample_sequence(&m, &[], &params, seed).unwrap(), g);
        }
    }

    #[test]
    fn greedy_tie_picks_lowest_id() {
        let v = vocab_ab();
        let mut m = TableModel::new(v.clone(), Distribution::one_hot(v.len(), EOS)).unwrap();
        m.insert(vec![], dist(&v, &[(6, 0.5), (7, 0.5)])).unwrap();
        let g = greedy_search(&m, &[], &loose()).unwrap();
        assert_eq!(g.ids, vec![6, EOS]);
    }

    #[test]
    fn greedy_respects_min_length() {
        let v = vocab_ab();
        // Prefers EOS immediately (0.9) everywhere.
        let m = TableModel::new(v.clone(), dist(&v, &[(EOS, 0.9), (6, 0.06), (7, 0.04)])).unwrap();
        let params = DecodeParams { min_length: 3, ..loose() };
        let g = greedy_search(&m, &[], &params).unwrap();
        assert_eq!(g.ids, vec![6, 6, 6, EOS]);
        assert!(g.ids.len() >= 3);
    }

    #[test]
    fn max_length_forces_termination() {
        let v = vocab_ab();
        let m = TableModel::new(v.clone(), Distribution::one_hot(v.len(), 6)).unwrap();
        let params = DecodeParams { max_length: 3, ..loose() };
        let g = greedy_search(&m, &[], &params).unwrap();
        assert_eq!(g.ids, vec![6, 6, EOS]);
        let b = beam_search(&m, &[], &params).unwrap();
        assert_eq!(b[0].ids, vec![6, 6, EOS]);
        assert!(b.iter().all(|h| h.finished && h.ids.len() <= 3));
    }

    #[test]
    fn sampling_is_seeded() {
        let v = vocab_ab();
        let m = TableModel::new(v.clone(), dist(&v, &[(EOS, 0.3), (6, 0.4), (7, 0.3)])).unwrap();
        let a = sample_sequence(&m, &[], &loose(), 99).unwrap();
        let b = sample_sequence(&m, &[], &loose(), 99).unwrap();
        assert_eq!(a, b);
        let differ = (0..50).any(|s| sample_sequence(&m, &[], &loose(), s).unwrap() != a);
        assert!(differ);
    }

    #[test]
    fn sampling_frequency_matches_distribution() {
        // p(a) = 0.7, p(EOS) = 0.3 at the first step. Over 10^4 draws the
        // binomial standard error is sqrt(0.21/10^4) ~ 0.0046, so 0.02 is
        // beyond 4 sigma.
        let v = vocab_ab();
        let m = TableModel::new(v.clone(), dist(&v, &[(EOS, 0.3), (6, 0.7)])).unwrap();
        let params = DecodeParams { max_length: 2, ..loose() };
        let hits = (0..10_000u64)
            .filter(|&s| sample_sequence(&m, &[], &params, s).unwrap().ids[0] == 6)
            .count();
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 0.7).abs() < 0.02, "empirical p(a) = {freq}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        /// Full-support table model over up to three words, keyed by every
        /// prefix up to `depth`.
        fn random_model(seed: u64, words: usize, depth: usize) -> TableModel {
            let names = ["a", "b", "c"];
            let v = Arc::new(Vocab::from_words(&names[..words]));
            let support: Vec<TokenId> = (FIRST_WORD..FIRST_WORD + words as TokenId).chain([EOS]).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draw = |rng: &mut ChaCha8Rng| {
                let mut p = vec![0.0; v.len()];
                for &t in &support {
                    p[t as usize] = rng.random::<f64>() + 0.01;
                }
                Distribution::from_weights(p).unwrap()
            };
            let mut m = TableModel::new(v.clone(), draw(&mut rng)).unwrap();
            let mut frontier = vec![Vec::new()];
            for _ in 0..depth {
                let mut next = Vec::new();
                for prefix in frontier {
                    m.insert(prefix.clone(), draw(&mut rng)).unwrap();
                    for &t in &support[..words] {
                        let mut p: Vec<TokenId> = prefix.clone();
                        p.push(t);
                        next.push(p);
                    }
                }
                frontier = next;
            }
            m
        }

        fn has_repeat(ids: &[TokenId], n: usize) -> bool {
            n > 0 && ids.len() >= n && {
                let grams: Vec<&[TokenId]> = ids.windows(n).collect();
                (0..grams.len()).any(|i| grams[..i].contains(&grams[i]))
            }
        }

        fn params_strategy() -> impl Strategy<Value = DecodeParams> {
            (1usize..=6, prop_oneof![Just(0.0), Just(0.6), Just(1.0)], 1usize..=6, 0usize..=6, 0usize..=3).prop_map(
                |(num_beams, length_penalty, max_length, min_length, n)| DecodeParams {
                    num_beams,
                    length_penalty,
                    min_length: min_length.min(max_length),
                    max_length,
                    no_repeat_ngram_size: n,
                },
            )
        }

        proptest! {
            #[test]
            fn emitted_hypotheses_respect_bounds(seed in any::<u64>(), words in 1usize..=3, params in params_strategy()) {
                let m = random_model(seed, words, 5);
                let mut outputs = beam_search(&m, &[], &params).unwrap();
                outputs.push(greedy_search(&m, &[], &params).unwrap());
                outputs.push(sample_sequence(&m, &[], &params, seed).unwrap());
                for h in &outputs {
                    prop_assert!(h.finished);
                    prop_assert_eq!(h.ids.last(), Some(&EOS));
                    prop_assert!(!h.ids[..h.ids.len() - 1].contains(&EOS));
                    prop_assert!(h.ids.len() <= params.max_length);
                    prop_assert!(h.ids.len() > params.min_length.min(params.max_length - 1));
                    // Without forcing or fallbacks, no configured n-gram repeats.
                    let forced = h.ids.len() == params.max_length;
                    let fallback = h.ids.iter().any(|&t| t != EOS && t < FIRST_WORD);
                    if !forced && !fallback {
                        prop_assert!(!has_repeat(&h.ids[..h.ids.len() - 1], params.no_repeat_ngram_size));
                    }
                }
            }

            #[test]
            fn decoders_are_deterministic(seed in any::<u64>(), params in params_strategy()) {
                let m = random_model(seed, 2, 5);
                prop_assert_eq!(beam_search(&m, &[], &params).unwrap(), beam_search(&m, &[], &params).unwrap());
                prop_assert_eq!(greedy_search(&m, &[], &params).unwrap(), greedy_search(&m, &[], &params).unwrap());
                prop_assert_eq!(
                    sample_sequence(&m, &[], &params, seed).unwrap(),
                    sample_sequence(&m, &[], &params, seed).unwrap()
                );
            }
        }
    
        fn top_score(m: &TableModel, params: &DecodeParams) -> f64 {
            beam_search(m, &[], params).unwrap()[0].penalized_score(params.length_penalty)
        }

        #[test]
        fn wider_beam_can_score_lower() {
            // Widening the beam admits a prefix that crowds out the path
            // the narrower beam followed: top-1 is not monotone in width.
            let m = random_model(119, 3, 6);
            let p = |k| DecodeParams {
                num_beams: k,
                length_penalty: 0.0,
                min_length: 0,
                max_length: 6,
                no_repeat_ngram_size: 0,
            };
            assert!(top_score(&m, &p(2)) < top_score(&m, &p(1)));
        }

        proptest! {
            #[test]
            fn exhaustive_width_dominates(seed in any::<u64>(), params in params_strategy()) {
                // Width 3^0 + ... + 3^5 covers every path of three words.
                let m = random_model(seed, 3, 6);
                let full = DecodeParams { num_beams: 364, ..params };
                prop_assert!(top_score(&m, &params) <= top_score(&m, &full));
            }
        }
    }
}
