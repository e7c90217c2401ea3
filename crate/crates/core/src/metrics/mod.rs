//! Evaluation metrics over the canonical tokenizer. All scores lie in `[0, 1]`.

pub mod bleu;
pub mod gleu;
pub mod meteor;
mod ngram;
pub mod rouge;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::EmotionLabel;

pub use bleu::{bleu, bleu_with, BleuBreakdown, BleuOptions};
pub use gleu::gleu;
pub use meteor::{meteor, meteor_with, MeteorOptions};
pub use rouge::{lcs_len, rouge_l, rouge_n};
pub use tokenize::{tokenize, TokenSeq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("length mismatch: {left} predictions vs {right} targets")]
    LengthMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricName {
    #[serde(rename = "exact_match")]
    ExactMatch,
    #[serde(rename = "bleu")]
    Bleu,
    #[serde(rename = "gleu")]
    Gleu,
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
    #[serde(rename = "meteor")]
    Meteor,
}

impl MetricName {
    /// Report order.
    pub const ALL: [MetricName; 7] = [
        MetricName::ExactMatch,
        MetricName::Bleu,
        MetricName::Gleu,
        MetricName::Rouge1,
        MetricName::Rouge2,
        MetricName::RougeL,
        MetricName::Meteor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::ExactMatch => "exact_match",
            MetricName::Bleu => "bleu",
            MetricName::Gleu => "gleu",
            MetricName::Rouge1 => "rouge1",
            MetricName::Rouge2 => "rouge2",
            MetricName::RougeL => "rougeL",
            MetricName::Meteor => "meteor",
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub name: MetricName,
    pub value: f64,
}

impl MetricValue {
    pub fn new(name: MetricName, value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "{name} = {value}");
        MetricValue { name, value }
    }
}

/// Fraction of positions where both labels are present and equal.
pub fn exact_match(pred: &[EmotionLabel], target: &[EmotionLabel]) -> Result<f64, MetricError> {
    if pred.len() != target.len() {
        return Err(MetricError::LengthMismatch {
            left: pred.len(),
            right: target.len(),
        });
    }
    if pred.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let hits = pred
        .iter()
        .zip(target)
        .filter(|(p, t)| p.emotion.is_some() && p.emotion == t.emotion)
        .count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Tokenizes (hypothesis, reference) text pairs.
pub fn tokenize_pairs<H: AsRef<str>, R: AsRef<str>>(pairs: &[(H, R)]) -> Vec<(TokenSeq, TokenSeq)> {
    pairs
        .iter()
        .map(|(h, r)| (tokenize(h.as_ref()), tokenize(r.as_ref())))
        .collect()
}

/// The six text metrics in report order, using default options.
pub fn paraphrase_metrics(corpus: &[(TokenSeq, TokenSeq)]) -> Result<Vec<MetricValue>, MetricError> {
    Ok(vec![
        MetricValue::new(MetricName::Bleu, bleu(corpus)?),
        MetricValue::new(MetricName::Gleu, gleu(corpus)?),
        MetricValue::new(MetricName::Rouge1, rouge_n(corpus, 1)?),
        MetricValue::new(MetricName::Rouge2, rouge_n(corpus, 2)?),
        MetricValue::new(MetricName::RougeL, rouge_l(corpus)?),
        MetricValue::new(MetricName::Meteor, meteor(corpus)?),
    ])
}

/// All seven metrics in report order.
pub fn score_all(
    corpus: &[(TokenSeq, TokenSeq)],
    pred: &[EmotionLabel],
    target: &[EmotionLabel],
) -> Result<Vec<MetricValue>, MetricError> {
    let mut out = vec![MetricValue::new(MetricName::ExactMatch, exact_match(pred, target)?)];
    out.extend(paraphrase_metrics(corpus)?);
    Ok(out)
}
