//! Extractive upper bounds: every overlapping sentence, or greedy ROUGE-1
//! F1 hill-climbing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rouge::{rouge_n, RougeScore};
use crate::text::{split_sentences, tokenize, TokenSeq};

/// Input sentences in section order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePool {
    sentences: Vec<String>,
}

impl SentencePool {
    /// Splits each section into sentences and concatenates them in the
    /// order given.
    pub fn from_sections<'a, I>(sections: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        Self {
            sentences: sections.into_iter().flat_map(split_sentences).collect(),
        }
    }

    /// Takes sentences as-is, dropping blank ones.
    pub fn from_sentences<I, S>(sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            sentences: sentences
                .into_iter()
                .map(Into::into)
                .filter(|s: &String| !s.trim().is_empty())
                .collect(),
        }
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    AllOverlap,
    GreedyBest,
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMode::AllOverlap => "all-overlap",
            OracleMode::GreedyBest => "greedy-best",
        })
    }
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-overlap" => Ok(OracleMode::AllOverlap),
            "greedy-best" => Ok(OracleMode::GreedyBest),
            other => Err(format!("unknown oracle mode `{other}` (all-overlap|greedy-best)")),
        }
    }
}

fn rouge1(hyp: &[String], reference: &[String]) -> RougeScore {
    rouge_n(hyp, reference, 1).expect("order 1 is valid")
}

/// Every sentence with positive ROUGE-1 recall, in pool order.
pub fn all_overlap(pool: &SentencePool, reference: &str) -> String {
    let reference = tokenize(reference);
    pool.sentences
        .iter()
        .filter(|s| rouge1(&tokenize(s), &reference).recall > 0.0)
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(" ")
}

/// One accepted round of [`greedy_best_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep {
    pub index: usize,
    pub f1: f64,
}

/// Adds, each round, the unused sentence that maximizes ROUGE-1 F1 of the
/// running summary (lowest index on ties); stops when nothing strictly
/// improves.
pub fn greedy_best_trace(pool: &SentencePool, reference: &str) -> Vec<GreedyStep> {
    let reference = tokenize(reference);
    let tokens: Vec<TokenSeq> = pool.sentences.iter().map(|s| tokenize(s)).collect();
    let mut used = vec![false; tokens.len()];
    let mut summary = TokenSeq::new();
    let mut current = 0.0;
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, sentence) in tokens.iter().enumerate() {
            if used[i] {
                continue;
            }
            let mut candidate = summary.clone();
            candidate.extend_from(sentence);
            let f1 = rouge1(&candidate, &reference).f1;
            if best.is_none_or(|(_, b)| f1 > b) {
                best = Some((i, f1));
            }
        }
        match best {
            Some((i, f1)) if f1 > current => {
                used[i] = true;
                summary.extend_from(&tokens[i]);
                current = f1;
                steps.push(GreedyStep { index: i, f1 });
            }
            _ => return steps,
        }
    }
}

pub fn greedy_best(pool: &SentencePool, reference: &str) -> String {
    greedy_best_trace(pool, reference)
        .iter()
        .map(|s| pool.sentences[s.index].as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run_oracle(mode: OracleMode, pool: &SentencePool, reference: &str) -> String {
    match mode {
        OracleMode::AllOverlap => all_overlap(pool, reference),
        OracleMode::GreedyBest => greedy_best(pool, reference),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pool(s: &[&str]) -> SentencePool {
        SentencePool::from_sentences(s.iter().copied())
    }

    fn f1(hyp: &str, reference: &str) -> f64 {
        rouge1(&tokenize(hyp), &tokenize(reference)).f1
    }

    #[test]
    fn all_overlap_examples() {
        let p = pool(&["fever noted", "stable vitals", "worsening cough"]);
        assert_eq!(all_overlap(&p, "fever and cough"), "fever noted worsening cough");
        assert_eq!(all_overlap(&p, "sepsis"), "");
        assert_eq!(
            all_overlap(&p, "fever stable cough"),
            "fever noted stable vitals worsening cough"
        );
    }

    #[test]
    fn greedy_examples() {
        let p = pool(&["patient is stable", "acute kidney injury", "kidney function low"]);
        assert_eq!(greedy_best(&p, "acute kidney injury"), "acute kidney injury");
        assert_eq!(greedy_best(&SentencePool::from_sentences(Vec::<String>::new()), "x"), "");
        assert_eq!(greedy_best(&p, "pneumonia"), "");
    }

    #[test]
    fn sections_split_in_order() {
        let p = SentencePool::from_sections(["A one. A two", "S one", "O one! O two?"]);
        assert_eq!(p.sentences(), &["A one", "A two", "S one", "O one", "O two"]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("greedy-best".parse::<OracleMode>().unwrap(), OracleMode::GreedyBest);
        assert_eq!(OracleMode::AllOverlap.to_string(), "all-overlap");
        assert!("best".parse::<OracleMode>().is_err());
    }

    fn arb_sentence() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 1..5)
            .prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn greedy_properties(
            sentences in prop::collection::vec(arb_sentence(), 0..7),
            reference in arb_sentence(),
        ) {
            let p = SentencePool::from_sentences(sentences.clone());
            let trace = greedy_best_trace(&p, &reference);
            for w in trace.windows(2) {
                prop_assert!(w[1].f1 > w[0].f1);
            }
            let mut seen = std::collections::HashSet::new();
            prop_assert!(trace.iter().all(|s| seen.insert(s.index)));
            let out = f1(&greedy_best(&p, &reference), &reference);
            let best_single = sentences.iter().map(|s| f1(s, &reference)).fold(0.0, f64::max);
            prop_assert!(out >= best_single);
            // Exhaustive subset bound.
            let n = sentences.len();
            let mut best_subset: f64 = 0.0;
            for mask in 0u32..(1 << n) {
                let text: Vec<&str> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| sentences[i].as_str()).collect();
                best_subset = best_subset.max(f1(&text.join(" "), &reference));
            }
            prop_assert!(out <= best_subset + 1e-12);
        }

        #[test]
        fn all_overlap_recall_dominates(
            sentences in prop::collection::vec(arb_sentence(), 1..7),
            reference in arb_sentence(),
        ) {
            let p = SentencePool::from_sentences(sentences.clone());
            let r = tokenize(&reference);
            let out = rouge1(&tokenize(&all_overlap(&p, &reference)), &r).recall;
            for s in &sentences {
                prop_assert!(out >= rouge1(&tokenize(s), &r).recall);
            }
        }
    }
}
