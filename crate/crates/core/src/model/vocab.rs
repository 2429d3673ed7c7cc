use std::collections::{BTreeSet, HashMap};

use crate::fields::{SEP_A, SEP_O, SEP_S};
use crate::text::tokenize;

use super::ModelError;

pub type TokenId = u32;

pub const BOS: TokenId = 0;
pub const EOS: TokenId = 1;
pub const UNK: TokenId = 2;
pub const SEP_A_ID: TokenId = 3;
pub const SEP_S_ID: TokenId = 4;
pub const SEP_O_ID: TokenId = 5;
/// Id of the first ordinary word.
pub const FIRST_WORD: TokenId = 6;

pub const RESERVED_TOKENS: [&str; 6] = ["<s>", "</s>", "<unk>", SEP_A, SEP_S, SEP_O];

/// Dense token <-> id map. Ids `0..6` are reserved, words follow in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl Vocab {
    /// Builds a vocabulary from words; duplicates and reserved literals are dropped.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: BTreeSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().to_string())
            .filter(|w| !w.is_empty() && !RESERVED_TOKENS.contains(&w.as_str()))
            .collect();
        let tokens: Vec<String> = RESERVED_TOKENS
            .iter()
            .map(|t| t.to_string())
            .chain(words)
            .collect();
        Self::from_tokens_unchecked(tokens)
    }

    /// Collects every token of every text, after tokenization.
    pub fn from_texts<'a, I>(texts: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut words = BTreeSet::new();
        for text in texts {
            words.extend(tokenize(text).into_inner());
        }
        Self::from_words(words)
    }

    /// Rebuilds from a full id-ordered token list (as stored in model files).
    pub fn from_token_list(tokens: Vec<String>) -> Result<Self, ModelError> {
        if tokens.len() < RESERVED_TOKENS.len()
            || tokens[..RESERVED_TOKENS.len()]
                .iter()
                .zip(RESERVED_TOKENS)
                .any(|(a, b)| a != b)
        {
            return Err(ModelError::InvalidVocab(
                "token list must start with the reserved tokens".into(),
            ));
        }
        let vocab = Self::from_tokens_unchecked(tokens);
        if vocab.index.len() != vocab.tokens.len() {
            return Err(ModelError::InvalidVocab("duplicate token".into()));
        }
        if vocab.tokens.iter().any(String::is_empty) {
            return Err(ModelError::InvalidVocab("empty token".into()));
        }
        Ok(vocab)
    }

    fn from_tokens_unchecked(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TokenId))
            .collect();
        Self { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn id_or_unk(&self, token: &str) -> TokenId {
        self.id(token).unwrap_or(UNK)
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_word(id: TokenId) -> bool {
        id >= FIRST_WORD
    }

    /// Encodes text, turning separator literals into their reserved ids and
    /// everything else into word ids (UNK when unknown).
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        let separators = [(SEP_A, SEP_A_ID), (SEP_S, SEP_S_ID), (SEP_O, SEP_O_ID)];
        let mut ids = Vec::new();
        let mut rest = text;
        loop {
            let next = separators
                .iter()
                .filter_map(|&(lit, id)| rest.find(lit).map(|pos| (pos, lit, id)))
                .min_by_key(|&(pos, _, _)| pos);
            match next {
                Some((pos, lit, id)) => {
                    ids.extend(tokenize(&rest[..pos]).iter().map(|t| self.id_or_unk(t)));
                    ids.push(id);
                    rest = &rest[pos + lit.len()..];
                }
                None => {
                    ids.extend(tokenize(rest).iter().map(|t| self.id_or_unk(t)));
                    return ids;
                }
            }
        }
    }

    /// Space-joined words; reserved ids (BOS, EOS, UNK, separators) are skipped.
    pub fn decode(&self, ids: &[TokenId]) -> String {
        ids.iter()
            .filter(|&&id| Self::is_word(id))
            .filter_map(|&id| self.token(id))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_ids_are_dense_and_distinct() {
        let v = Vocab::from_words(["b", "a", "a", "</s>"]);
        assert_eq!(v.len(), 8);
        assert_eq!(v.id("<s>"), Some(BOS));
        assert_eq!(v.id("</s>"), Some(EOS));
        assert_eq!(v.id("<unk>"), Some(UNK));
        assert_eq!(v.id("<asm>"), Some(SEP_A_ID));
        assert_eq!(v.id("a"), Some(FIRST_WORD));
        assert_eq!(v.id("b"), Some(FIRST_WORD + 1));
        for (i, t) in v.tokens().iter().enumerate() {
            assert_eq!(v.id(t), Some(i as TokenId));
            assert_eq!(v.token(i as TokenId), Some(t.as_str()));
        }
    }

    #[test]
    fn encode_handles_separators_and_unknowns() {
        let v = Vocab::from_words(["chf", "sepsis"]);
        let ids = v.encode("<asm> CHF, sepsis <subj> fever");
        assert_eq!(
            ids,
            vec![SEP_A_ID, v.id("chf").unwrap(), v.id("sepsis").unwrap(), SEP_S_ID, UNK]
        );
        assert_eq!(v.decode(&ids), "chf sepsis");
        assert_eq!(v.encode(""), Vec::<TokenId>::new());
    }

    #[test]
    fn token_list_round_trip() {
        let v = Vocab::from_words(["x", "y"]);
        let back = Vocab::from_token_list(v.tokens().to_vec()).unwrap();
        assert_eq!(v, back);
        assert!(Vocab::from_token_list(vec!["x".into()]).is_err());
        let mut dup = v.tokens().to_vec();
        dup.push("x".into());
        assert!(Vocab::from_token_list(dup).is_err());
    }
}
