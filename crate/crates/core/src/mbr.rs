//! Consensus selection over a pool of candidate outputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rouge::Reward;
use crate::text::{tokenize, TokenSeq};

/// Scores within this distance of the maximum count as tied; the lowest
/// index among them wins. Keeps selection stable under summation order.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MbrError {
    #[error("candidate pool is empty")]
    EmptyPool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    /// Which system produced the text.
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    candidates: Vec<Candidate>,
}

impl CandidatePool {
    pub fn new(candidates: Vec<Candidate>) -> Result<Self, MbrError> {
        if candidates.is_empty() {
            return Err(MbrError::EmptyPool);
        }
        Ok(Self { candidates })
    }

    /// Unlabelled candidates.
    pub fn from_texts<I, S>(texts: I) -> Result<Self, MbrError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            texts
                .into_iter()
                .map(|t| Candidate {
                    text: t.into(),
                    label: String::new(),
                })
                .collect(),
        )
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn text(&self, i: usize) -> &str {
        &self.candidates[i].text
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MbrResult {
    pub selected_index: usize,
    pub consensus_scores: Vec<f64>,
    pub reward_matrix: Vec<Vec<f64>>,
}

/// `m[i][j] = reward(hyp = candidate i, ref = candidate j)`, diagonal included.
pub fn reward_matrix(pool: &CandidatePool, reward: &Reward) -> Vec<Vec<f64>> {
    let tokens: Vec<TokenSeq> = pool.candidates.iter().map(|c| tokenize(&c.text)).collect();
    tokens
        .iter()
        .map(|hyp| tokens.iter().map(|r| reward.score_tokens(hyp, r)).collect())
        .collect()
}

/// Index of the largest score; lowest index among scores within
/// [`TIE_TOLERANCE`] of the maximum.
pub fn argmax_lowest(scores: &[f64]) -> Option<usize> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().position(|&s| s >= max - TIE_TOLERANCE)
}

pub fn mbr_select(pool: &CandidatePool, reward: &Reward) -> MbrResult {
    let matrix = reward_matrix(pool, reward);
    let consensus_scores: Vec<f64> = matrix.iter().map(|row| row.iter().sum()).collect();
    let selected_index = argmax_lowest(&consensus_scores).expect("pool is non-empty");
    MbrResult {
        selected_index,
        consensus_scores,
        reward_matrix: matrix,
    }
}

/// Number of candidates that strictly outscore `i`, under the tie tolerance.
pub fn consensus_rank(scores: &[f64], i: usize) -> usize {
    scores.iter().filter(|&&s| s > scores[i] + TIE_TOLERANCE).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pool(texts: &[&str]) -> CandidatePool {
        CandidatePool::from_texts(texts.iter().copied()).unwrap()
    }

    #[test]
    fn worked_pool() {
        let p = pool(&["a b", "a b", "c"]);
        let r = mbr_select(&p, &Reward::default());
        assert_eq!(
            r.reward_matrix,
            vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
        assert_eq!(r.consensus_scores, vec![2.0, 2.0, 1.0]);
        assert_eq!(r.selected_index, 0);
    }

    #[test]
    fn singleton_and_identical_pools() {
        let r = mbr_select(&pool(&["sepsis"]), &Reward::default());
        assert_eq!(r.reward_matrix, vec![vec![1.0]]);
        assert_eq!(r.selected_index, 0);
        let r = mbr_select(&pool(&["x y"; 5]), &Reward::default());
        assert!(r.reward_matrix.iter().flatten().all(|&v| v == 1.0));
        assert_eq!(r.consensus_scores, vec![5.0; 5]);
        assert_eq!(r.selected_index, 0);
        assert_eq!(CandidatePool::new(vec![]), Err(MbrError::EmptyPool));
    }

    #[test]
    fn outlier_is_rejected() {
        for n in 3..8 {
            let mut texts = vec!["acute kidney injury"; n - 1];
            for pos in 0..n {
                texts.insert(pos, "zzz qqq");
                let r = mbr_select(&pool(&texts), &Reward::default());
                assert_ne!(r.selected_index, pos);
                texts.remove(pos);
            }
        }
    }

    #[test]
    fn asymmetric_rewards_use_full_matrix() {
        let p = pool(&["a", "a b c"]);
        let recall = Reward::new(crate::rouge::RougeVariant::L, crate::rouge::ScoreField::Recall);
        let m = reward_matrix(&p, &recall);
        assert_eq!(m[0][1], 1.0 / 3.0);
        assert_eq!(m[1][0], 1.0);
    }

    fn arb_pool() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 1..5)
                .prop_map(|w| w.join(" ")),
            1..7,
        )
    }

    proptest! {
        #[test]
        fn self_term_does_not_move_argmax(texts in arb_pool()) {
            let p = CandidatePool::from_texts(texts.clone()).unwrap();
            let r = mbr_select(&p, &Reward::default());
            let without: Vec<f64> = r.reward_matrix.iter().enumerate()
                .map(|(i, row)| row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).sum())
                .collect();
            prop_assert_eq!(argmax_lowest(&without), Some(r.selected_index));
        }

        #[test]
        fn duplicate_never_lowers_rank(texts in arb_pool(), pick in 0usize..7) {
            let i = pick % texts.len();
            let before = mbr_select(&CandidatePool::from_texts(texts.clone()).unwrap(), &Reward::default());
            let mut grown = texts.clone();
            grown.push(texts[i].clone());
            let after = mbr_select(&CandidatePool::from_texts(grown).unwrap(), &Reward::default());
            prop_assert!(
                consensus_rank(&after.consensus_scores, i) <= consensus_rank(&before.consensus_scores, i)
            );
        }

        #[test]
        fn permutation_moves_scores(texts in arb_pool(), rot in 0usize..7) {
            let n = texts.len();
            let k = rot % n;
            let mut rotated = texts.clone();
            rotated.rotate_left(k);
            let a = mbr_select(&CandidatePool::from_texts(texts.clone()).unwrap(), &Reward::default());
            let b = mbr_select(&CandidatePool::from_texts(rotated).unwrap(), &Reward::default());
            for j in 0..n {
                prop_assert!((b.consensus_scores[j] - a.consensus_scores[(j + k) % n]).abs() < 1e-12);
            }
            let chosen = &texts[(b.selected_index + k) % n];
            let best = a.consensus_scores[a.selected_index];
            let score_of_chosen = a.consensus_scores[(b.selected_index + k) % n];
            prop_assert!((score_of_chosen - best).abs() <= TIE_TOLERANCE);
            prop_assert!(texts.contains(chosen));
        }
    }
}
