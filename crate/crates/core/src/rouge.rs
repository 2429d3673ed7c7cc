//! ROUGE-N and ROUGE-L scoring from scratch.
//!
//! Scores are plain F1 (beta = 1) over whole token sequences. ROUGE-L uses a
//! single LCS between hypothesis and reference, with no sentence-level union.
//! A side with nothing to count scores 0 on its ratio, so two empty inputs
//! score 0 everywhere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{ngrams, tokenize, TokenSeq};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RougeError {
    #[error("ROUGE-N order must be at least 1")]
    ZeroOrder,
    #[error("unknown ROUGE variant `{0}` (expected 1, 2, L or N<order>)")]
    UnknownVariant(String),
    #[error("unknown score field `{0}` (expected precision, recall or f1)")]
    UnknownField(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub const ZERO: RougeScore = RougeScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
        }
    }

    /// Builds a score from a match count and the two denominators.
    fn from_counts(matched: usize, hyp_total: usize, ref_total: usize) -> Self {
        let ratio = |den: usize| {
            if den == 0 {
                0.0
            } else {
                matched as f64 / den as f64
            }
        };
        Self::from_pr(ratio(hyp_total), ratio(ref_total))
    }

    pub fn get(&self, field: ScoreField) -> f64 {
        match field {
            ScoreField::Precision => self.precision,
            ScoreField::Recall => self.recall,
            ScoreField::F1 => self.f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RougeVariant {
    N(usize),
    L,
}

impl RougeVariant {
    pub const R1: RougeVariant = RougeVariant::N(1);
    pub const R2: RougeVariant = RougeVariant::N(2);

    /// Short column label, e.g. `R1`, `R2`, `RL`.
    pub fn label(&self) -> String {
        match self {
            RougeVariant::N(n) => format!("R{n}"),
            RougeVariant::L => "RL".to_string(),
        }
    }
}

impl fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RougeVariant::N(n) => write!(f, "{n}"),
            RougeVariant::L => write!(f, "L"),
        }
    }
}

impl FromStr for RougeVariant {
    type Err = RougeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let body = trimmed
            .strip_prefix("rouge-")
            .or_else(|| trimmed.strip_prefix("ROUGE-"))
            .unwrap_or(trimmed);
        match body {
            "L" | "l" | "RL" => Ok(RougeVariant::L),
            _ => {
                let digits = body
                    .strip_prefix('N')
                    .or_else(|| body.strip_prefix('n'))
                    .or_else(|| body.strip_prefix('R'))
                    .unwrap_or(body);
                match digits.parse::<usize>() {
                    Ok(0) => Err(RougeError::ZeroOrder),
                    Ok(n) => Ok(RougeVariant::N(n)),
                    Err(_) => Err(RougeError::UnknownVariant(s.to_string())),
                }
            }
        }
    }
}

impl TryFrom<String> for RougeVariant {
    type Error = RougeError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<RougeVariant> for String {
    fn from(v: RougeVariant) -> Self {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreField {
    Precision,
    Recall,
    F1,
}

impl ScoreField {
    pub const ALL: [ScoreField; 3] = [ScoreField::F1, ScoreField::Precision, ScoreField::Recall];

    pub fn label(&self) -> &'static str {
        match self {
            ScoreField::Precision => "Prec",
            ScoreField::Recall => "Rec",
            ScoreField::F1 => "F1",
        }
    }
}

impl FromStr for ScoreField {
    type Err = RougeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p" | "prec" | "precision" => Ok(ScoreField::Precision),
            "r" | "rec" | "recall" => Ok(ScoreField::Recall),
            "f" | "f1" | "fmeasure" => Ok(ScoreField::F1),
            _ => Err(RougeError::UnknownField(s.to_string())),
        }
    }
}

/// A scalar reward: one ROUGE variant, one field of its score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reward {
    pub variant: RougeVariant,
    pub field: ScoreField,
}

impl Default for Reward {
    /// ROUGE-L F1.
    fn default() -> Self {
        Self {
            variant: RougeVariant::L,
            field: ScoreField::F1,
        }
    }
}

impl Reward {
    pub fn new(variant: RougeVariant, field: ScoreField) -> Self {
        Self { variant, field }
    }

    pub fn score_tokens(&self, hyp: &[String], reference: &[String]) -> f64 {
        score_tokens(hyp, reference, self.variant)
            .expect("variant order validated at construction")
            .get(self.field)
    }

    pub fn score_text(&self, hyp: &str, reference: &str) -> f64 {
        self.score_tokens(&tokenize(hyp), &tokenize(reference))
    }
}

impl fmt::Display for Reward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.variant, self.field.label().to_ascii_lowercase())
    }
}

impl FromStr for Reward {
    type Err = RougeError;

    /// Parses `L`, `L:f1`, `2:recall` and similar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((variant, field)) => Ok(Reward::new(variant.parse()?, field.parse()?)),
            None => Ok(Reward::new(s.parse()?, ScoreField::F1)),
        }
    }
}

pub fn rouge_n(hyp: &[String], reference: &[String], n: usize) -> Result<RougeScore, RougeError> {
    let hyp_grams = ngrams(hyp, n).map_err(|_| RougeError::ZeroOrder)?;
    let ref_grams = ngrams(reference, n).map_err(|_| RougeError::ZeroOrder)?;
    let matched = hyp_grams.overlap(&ref_grams);
    Ok(RougeScore::from_counts(
        matched,
        hyp_grams.total(),
        ref_grams.total(),
    ))
}

/// Longest common subsequence length, O(|a|·|b|) time and O(min) memory.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn rouge_l(hyp: &[String], reference: &[String]) -> RougeScore {
    RougeScore::from_counts(lcs_length(hyp, reference), hyp.len(), reference.len())
}

pub fn score_tokens(
    hyp: &[String],
    reference: &[String],
    variant: RougeVariant,
) -> Result<RougeScore, RougeError> {
    match variant {
        RougeVariant::N(n) => rouge_n(hyp, reference, n),
        RougeVariant::L => Ok(rouge_l(hyp, reference)),
    }
}

/// Tokenizes both texts and scores them.
pub fn score(hyp: &str, reference: &str, variant: RougeVariant) -> Result<RougeScore, RougeError> {
    score_tokens(&tokenize(hyp), &tokenize(reference), variant)
}

/// R1, R2 and RL for one pair, tokenizing once.
pub fn score_all(hyp: &TokenSeq, reference: &TokenSeq) -> [RougeScore; 3] {
    [
        rouge_n(hyp, reference, 1).expect("order 1"),
        rouge_n(hyp, reference, 2).expect("order 2"),
        rouge_l(hyp, reference),
    ]
}
