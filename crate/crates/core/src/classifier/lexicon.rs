use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::{Classifier, ScoreVector};
use crate::gateway::GatewayError;
use crate::taxonomy::{EmotionId, EMOTION_COUNT};

/// Built-in keyword table: (keyword, emotion, weight).
const DEFAULT_LEXICON: &[(&str, &str, f64)] = &[
    ("admire", "admiration", 0.6),
    ("impressive", "admiration", 0.6),
    ("brilliant", "admiration", 0.6),
    ("amazing", "admiration", 0.3),
    ("funny", "amusement", 0.6),
    ("hilarious", "amusement", 0.7),
    ("lol", "amusement", 0.6),
    ("haha", "amusement", 0.6),
    ("furious", "anger", 0.9),
    ("angry", "anger", 0.7),
    ("rage", "anger", 0.7),
    ("hate", "anger", 0.6),
    ("annoyed", "annoyance", 0.7),
    ("annoying", "annoyance", 0.7),
    ("irritating", "annoyance", 0.6),
    ("ugh", "annoyance", 0.6),
    ("agree", "approval", 0.6),
    ("approve", "approval", 0.7),
    ("good", "approval", 0.3),
    ("care", "caring", 0.6),
    ("support", "caring", 0.4),
    ("confused", "confusion", 0.7),
    ("confusing", "confusion", 0.6),
    ("curious", "curiosity", 0.7),
    ("wonder", "curiosity", 0.6),
    ("want", "desire", 0.6),
    ("wish", "desire", 0.6),
    ("disappointed", "disappointment", 0.7),
    ("disappointing", "disappointment", 0.7),
    ("disapprove", "disapproval", 0.7),
    ("wrong", "disapproval", 0.6),
    ("disgusting", "disgust", 0.8),
    ("gross", "disgust", 0.7),
    ("embarrassed", "embarrassment", 0.8),
    ("awkward", "embarrassment", 0.6),
    ("excited", "excitement", 0.8),
    ("thrilled", "excitement", 0.8),
    ("afraid", "fear", 0.7),
    ("scared", "fear", 0.7),
    ("terrified", "fear", 0.9),
    ("thanks", "gratitude", 0.8),
    ("thank", "gratitude", 0.8),
    ("grateful", "gratitude", 0.8),
    ("devastated", "grief", 0.8),
    ("mourning", "grief", 0.8),
    ("happy", "joy", 0.7),
    ("glad", "joy", 0.6),
    ("won", "joy", 0.6),
    ("love", "love", 0.8),
    ("adore", "love", 0.8),
    ("nervous", "nervousness", 0.8),
    ("anxious", "nervousness", 0.7),
    ("hope", "optimism", 0.6),
    ("hopeful", "optimism", 0.7),
    ("proud", "pride", 0.8),
    ("realize", "realization", 0.6),
    ("realized", "realization", 0.6),
    ("relieved", "relief", 0.8),
    ("phew", "relief", 0.6),
    ("sorry", "remorse", 0.7),
    ("regret", "remorse", 0.7),
    ("sad", "sadness", 0.7),
    ("unhappy", "sadness", 0.6),
    ("surprised", "surprise", 0.7),
    ("wow", "surprise", 0.6),
    ("okay", "neutral", 0.6),
    ("ok", "neutral", 0.6),
    ("noted", "neutral", 0.6),
];

/// One keyword entry of a custom lexicon file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconEntry {
    pub keyword: String,
    pub emotion: EmotionId,
    pub weight: f64,
}

/// Keyword classifier: each emotion scores `min(1, sum of weights of the
/// distinct keywords present)`. Matching is on lowercase whole words.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    table: BTreeMap<String, Vec<(EmotionId, f64)>>,
}

impl Default for LexiconClassifier {
    fn default() -> Self {
        let entries = DEFAULT_LEXICON.iter().map(|(k, e, w)| LexiconEntry {
            keyword: k.to_string(),
            emotion: EmotionId::from_name(e).expect("built-in lexicon uses canonical names"),
            weight: *w,
        });
        Self::from_entries(entries).expect("built-in lexicon is valid")
    }
}

impl LexiconClassifier {
    pub fn from_entries<I>(entries: I) -> Result<Self, GatewayError>
    where
        I: IntoIterator<Item = LexiconEntry>,
    {
        let mut table: BTreeMap<String, Vec<(EmotionId, f64)>> = BTreeMap::new();
        for e in entries {
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(GatewayError::Config(format!(
                    "lexicon weight for {:?} must be non-negative, got {}",
                    e.keyword, e.weight
                )));
            }
            let lowered = e.keyword.to_lowercase();
            let words = words(&lowered);
            let [word] = words.as_slice() else {
                return Err(GatewayError::Config(format!(
                    "lexicon keyword {:?} must be a single word",
                    e.keyword
                )));
            };
            table
                .entry(word.to_string())
                .or_default()
                .push((e.emotion, e.weight));
        }
        Ok(LexiconClassifier { table })
    }

    /// Parses a JSON array of `{"keyword", "emotion", "weight"}` objects.
    pub fn from_json(json: &str) -> Result<Self, GatewayError> {
        let entries: Vec<LexiconEntry> =
            serde_json::from_str(json).map_err(|e| GatewayError::Config(e.to_string()))?;
        Self::from_entries(entries)
    }

    pub fn score(&self, text: &str) -> ScoreVector {
        let lowered = text.to_lowercase();
        let present: BTreeSet<&str> = words(&lowered).into_iter().collect();
        let mut sums = [0.0f64; EMOTION_COUNT];
        // BTreeSet iteration keeps the summation order fixed.
        for w in present {
            if let Some(hits) = self.table.get(w) {
                for (id, weight) in hits {
                    sums[id.index()] += weight;
                }
            }
        }
        for s in &mut sums {
            *s = s.min(1.0);
        }
        ScoreVector::from_slice(&sums).expect("clamped sums lie in [0, 1]")
    }
}

fn words(text: &str) -> Vec<&str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .collect()
}

impl Classifier for LexiconClassifier {
    fn name(&self) -> &str {
        "lexicon"
    }

    fn classify_scores(&self, texts: &[&str]) -> Result<Vec<ScoreVector>, GatewayError> {
        Ok(texts.iter().map(|t| self.score(t)).collect())
    }
}
