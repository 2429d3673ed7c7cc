//! Seeded synthetic progress notes.
//!
//! Each record lists a few problems in its assessment, mentions symptoms in
//! the subjective section (sometimes echoing a problem) and vitals and labs
//! in the objective section. The summary is a noisy subset of the
//! assessment's problems, so the assessment carries most of the signal.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::NoteRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthStat {
    pub mean: f64,
    pub std: f64,
}

impl LengthStat {
    /// Normal draw rounded and clipped to `[1, mean + 3·std]`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let hi = (self.mean + 3.0 * self.std).max(1.0);
        let x = if self.std > 0.0 {
            Normal::new(self.mean, self.std).expect("std > 0").sample(rng)
        } else {
            self.mean
        };
        x.round().clamp(1.0, hi.round()) as usize
    }
}

/// Word-count targets per section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub objective: LengthStat,
    pub subjective: LengthStat,
    pub assessment: LengthStat,
    pub summary: LengthStat,
}

impl Default for LengthProfile {
    fn default() -> Self {
        Self {
            objective: LengthStat { mean: 304.7, std: 83.4 },
            subjective: LengthStat { mean: 85.5, std: 54.8 },
            assessment: LengthStat { mean: 33.7, std: 17.1 },
            summary: LengthStat { mean: 10.5, std: 7.5 },
        }
    }
}

const PROBLEMS: &[&str] = &[
    "acute kidney injury",
    "sepsis",
    "community acquired pneumonia",
    "atrial fibrillation",
    "congestive heart failure exacerbation",
    "hypertension",
    "type two diabetes mellitus",
    "copd exacerbation",
    "urinary tract infection",
    "anemia",
    "hypokalemia",
    "altered mental status",
    "acute hypoxic respiratory failure",
    "upper gastrointestinal bleed",
    "alcohol withdrawal",
    "decompensated cirrhosis",
    "acute pancreatitis",
    "deep vein thrombosis",
    "pulmonary embolism",
    "hyponatremia",
    "lower extremity cellulitis",
    "delirium",
    "end stage renal disease",
    "coronary artery disease",
    "hypotension",
    "septic shock",
    "ischemic stroke",
    "seizure disorder",
    "thrombocytopenia",
    "hyperglycemia",
    "malnutrition",
    "pressure ulcer",
    "aspiration pneumonia",
    "demand ischemia",
    "chronic pain",
    "depression",
];

const ASSESSMENT_FILLER: &[&str] = &[
    "patient", "presents", "with", "likely", "secondary", "to", "history", "of", "admitted",
    "for", "now", "improving", "stable", "continue", "monitor", "plan", "per", "team", "year",
    "old", "man", "woman", "on", "day", "and", "new", "onset", "worsening", "consult", "follow",
    "up", "trend", "labs", "management", "in", "setting",
];

const SUMMARY_NOISE: &[&str] = &["acute", "chronic", "likely", "resolved", "possible", "recurrent"];

const SUBJECTIVE: &[&str] = &[
    "reports", "denies", "pain", "nausea", "vomiting", "cough", "dyspnea", "fatigue", "fever",
    "chills", "feels", "better", "worse", "overnight", "slept", "poorly", "appetite", "headache",
    "dizziness", "family", "at", "bedside", "no", "complaints", "tolerating", "diet", "ambulating",
    "with", "assistance", "anxious", "confused", "this", "morning", "per", "nursing", "mild",
    "abdominal", "chest", "shortness", "of", "breath",
];

const OBJECTIVE: &[&str] = &[
    "bp", "hr", "rr", "temp", "spo2", "wbc", "hgb", "plt", "na", "k", "cr", "bun", "glucose",
    "lactate", "lungs", "clear", "crackles", "heart", "rrr", "murmur", "abdomen", "soft",
    "nontender", "distended", "extremities", "edema", "trace", "no", "alert", "oriented", "gen",
    "nad", "neuro", "intact", "skin", "warm", "dry", "io", "net", "positive", "negative", "ra",
    "nc", "cxr", "ekg", "sinus", "rhythm",
];

fn words(phrase: &str) -> impl Iterator<Item = &str> {
    phrase.split_whitespace()
}

fn filler_words(rng: &mut ChaCha8Rng, vocab: &[&'static str], n: usize) -> Vec<&'static str> {
    (0..n).map(|_| *vocab.choose(rng).expect("non-empty")).collect()
}

fn make_record(rng: &mut ChaCha8Rng, id: String, profile: &LengthProfile) -> NoteRecord {
    let len_a = profile.assessment.sample(rng);
    let len_s = profile.subjective.sample(rng);
    let len_o = profile.objective.sample(rng);
    let len_y = profile.summary.sample(rng);

    let mut problems: Vec<&str> = PROBLEMS.to_vec();
    problems.shuffle(rng);
    // Summary problems: at least one, until the summary target is met.
    let mut chosen = Vec::new();
    let mut count = 0;
    for &p in &problems {
        if !chosen.is_empty() && (count >= len_y || count + words(p).count() > len_a.max(3)) {
            break;
        }
        count += words(p).count();
        chosen.push(p);
    }
    let distractors = rng.random_range(0..=2usize);
    let extra: Vec<&str> = problems[chosen.len()..].iter().take(distractors).copied().collect();

    // Assessment: problem mentions with short filler runs, split into
    // sentences, then padded with filler to the target length.
    let mut mentions: Vec<&str> = chosen.iter().chain(extra.iter()).copied().collect();
    mentions.shuffle(rng);
    let mut sentences: Vec<Vec<&str>> = vec![Vec::new()];
    for p in mentions {
        let lead = rng.random_range(0..=3usize);
        let current = sentences.last_mut().expect("non-empty");
        current.extend(filler_words(rng, ASSESSMENT_FILLER, lead));
        current.extend(words(p));
        if rng.random_bool(0.5) {
            sentences.push(Vec::new());
        }
    }
    let mut total: usize = sentences.iter().map(Vec::len).sum();
    while total < len_a {
        let n = (len_a - total).min(rng.random_range(3..=8usize));
        sentences.push(filler_words(rng, ASSESSMENT_FILLER, n));
        total += n;
    }
    let assessment = sentences
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.join(" "))
        .collect::<Vec<_>>()
        .join(". ");

    // Summary: the chosen problems with light noise.
    let mut items: Vec<String> = Vec::new();
    for p in &chosen {
        let mut w: Vec<&str> = words(p).collect();
        if w.len() > 1 && rng.random_bool(0.15) {
            let drop = rng.random_range(0..w.len());
            w.remove(drop);
        }
        if rng.random_bool(0.2) {
            w.insert(0, SUMMARY_NOISE.choose(rng).expect("non-empty"));
        }
        items.push(w.join(" "));
    }
    let summary = items.join(", ");

    let mut subjective = filler_words(rng, SUBJECTIVE, len_s).join(" ");
    if rng.random_bool(0.4) {
        let echo = chosen.choose(rng).expect("non-empty");
        subjective = format!("history of {echo}. {subjective}");
    }

    let objective: Vec<String> = (0..len_o)
        .map(|_| {
            if rng.random_bool(0.35) {
                rng.random_range(1..=200u32).to_string()
            } else {
                OBJECTIVE.choose(rng).expect("non-empty").to_string()
            }
        })
        .collect();

    NoteRecord {
        id,
        assessment,
        subjective,
        objective: objective.join(" "),
        summary: Some(summary),
    }
}

/// `size` records with ids `note-0000`, `note-0001`, ….
pub fn synth_corpus(seed: u64, size: usize, profile: &LengthProfile) -> Vec<NoteRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| make_record(&mut rng, format!("note-{i:04}"), profile))
        .collect()
}
