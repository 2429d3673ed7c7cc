//! Tokenization, n-gram extraction and sentence splitting.
//!
//! Every metric, oracle and toy model in the crate goes through these
//! functions, so the normalization rule is fixed in one place: lowercase,
//! split on maximal runs of non-alphanumeric characters, keep digits, no
//! stemming and no stop-word removal.

use std::collections::HashMap;
use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
}

/// Ordered list of normalized word tokens. Never contains an empty token.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds a sequence from already-normalized tokens, dropping empty ones.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(
            tokens
                .into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty())
                .collect(),
        )
    }

    pub fn push(&mut self, token: impl Into<String>) {
        let token = token.into();
        if !token.is_empty() {
            self.0.push(token);
        }
    }

    pub fn extend_from(&mut self, other: &TokenSeq) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Multiset of contiguous n-grams of a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramMultiset {
    order: usize,
    counts: HashMap<Vec<String>, usize>,
}

impl NgramMultiset {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<String>, usize)> {
        self.counts.iter().map(|(g, &c)| (g, c))
    }

    /// Clipped overlap: sum over n-grams of min(count here, count there).
    pub fn overlap(&self, other: &NgramMultiset) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(g, &c)| c.min(large.count(g)))
            .sum()
    }
}

pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase().filter(|c| c.is_alphanumeric()));
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenSeq(tokens)
}

pub fn ngrams(seq: &[String], n: usize) -> Result<NgramMultiset, TextError> {
    if n == 0 {
        return Err(TextError::ZeroOrder);
    }
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    for window in seq.windows(n) {
        *counts.entry(window.to_vec()).or_insert(0) += 1;
    }
    Ok(NgramMultiset { order: n, counts })
}

const SENTENCE_TERMINATORS: [char; 4] = ['.', '!', '?', '\n'];

pub fn split_sentences(text: &str) -> Vec<String> {
    text.split(|c| SENTENCE_TERMINATORS.contains(&c))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}
