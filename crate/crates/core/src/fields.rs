//! Note sections and the separator literals used to concatenate them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SEP_A: &str = "<asm>";
pub const SEP_S: &str = "<subj>";
pub const SEP_O: &str = "<obj>";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("unknown field `{0}` (expected A, S or O)")]
    Unknown(String),
    #[error("field {0} listed twice")]
    Repeated(Field),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    /// Assessment.
    A,
    /// Subjective.
    S,
    /// Objective.
    O,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::A, Field::S, Field::O];

    pub fn separator(self) -> &'static str {
        match self {
            Field::A => SEP_A,
            Field::S => SEP_S,
            Field::O => SEP_O,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Field::A => "A",
            Field::S => "S",
            Field::O => "O",
        };
        f.write_str(c)
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "assessment" => Ok(Field::A),
            "s" | "subjective" => Ok(Field::S),
            "o" | "objective" => Ok(Field::O),
            other => Err(FieldError::Unknown(other.to_string())),
        }
    }
}

/// Ordered, repeat-free subset of sections. Empty means the empty-input baseline.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Field>", into = "Vec<Field>")]
pub struct FieldSpec(Vec<Field>);

impl FieldSpec {
    pub fn new(fields: Vec<Field>) -> Result<Self, FieldError> {
        for (i, f) in fields.iter().enumerate() {
            if fields[..i].contains(f) {
                return Err(FieldError::Repeated(*f));
            }
        }
        Ok(Self(fields))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn assessment() -> Self {
        Self(vec![Field::A])
    }

    pub fn assessment_subjective() -> Self {
        Self(vec![Field::A, Field::S])
    }

    pub fn all() -> Self {
        Self(Field::ALL.to_vec())
    }

    pub fn fields(&self) -> &[Field] {
        &self.0
    }

    pub fn contains(&self, field: Field) -> bool {
        self.0.contains(&field)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Field>> for FieldSpec {
    type Error = FieldError;

    fn try_from(v: Vec<Field>) -> Result<Self, Self::Error> {
        FieldSpec::new(v)
    }
}

impl From<FieldSpec> for Vec<Field> {
    fn from(spec: FieldSpec) -> Self {
        spec.0
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `A`, `A+S`, `A,S,O`, or `none` / empty for the baseline.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") || s == "∅" {
            return Ok(FieldSpec::empty());
        }
        let fields = s
            .split(['+', ','])
            .map(str::parse)
            .collect::<Result<Vec<Field>, _>>()?;
        FieldSpec::new(fields)
    }
}
