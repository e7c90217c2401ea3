//! Emotion classification backends and dominant-emotion thresholding.

mod lexicon;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexicon::{LexiconClassifier, LexiconEntry};

use crate::gateway::{run_chunked, GatewayError, RemoteEndpoint, RemoteOptions};
use crate::taxonomy::{EmotionId, EMOTION_COUNT};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Per-emotion likelihoods indexed by [`EmotionId`]. Values are independent
/// sigmoid outputs and need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScoreVector([f64; EMOTION_COUNT]);

impl ScoreVector {
    pub fn zeros() -> Self {
        ScoreVector([0.0; EMOTION_COUNT])
    }

    pub fn from_slice(values: &[f64]) -> Result<Self, GatewayError> {
        if values.len() != EMOTION_COUNT {
            return Err(GatewayError::Malformed(format!(
                "score vector has {} entries, expected {EMOTION_COUNT}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(GatewayError::Malformed(format!(
                "score {bad} is outside [0, 1]"
            )));
        }
        let mut out = [0.0; EMOTION_COUNT];
        out.copy_from_slice(values);
        Ok(ScoreVector(out))
    }

    /// Builds a vector from sparse `(emotion, score)` entries; the rest are 0.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GatewayError>
    where
        I: IntoIterator<Item = (EmotionId, f64)>,
    {
        let mut v = [0.0; EMOTION_COUNT];
        for (id, s) in pairs {
            v[id.index()] = s;
        }
        Self::from_slice(&v)
    }

    pub fn get(&self, id: EmotionId) -> f64 {
        self.0[id.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ScoreVector {
    type Error = GatewayError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        ScoreVector::from_slice(&v)
    }
}

impl From<ScoreVector> for Vec<f64> {
    fn from(v: ScoreVector) -> Self {
        v.0.to_vec()
    }
}

/// The dominant emotion of a text, or none when no score passed the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionLabel {
    pub emotion: Option<EmotionId>,
    pub score: Option<f64>,
}

impl EmotionLabel {
    pub fn none() -> Self {
        EmotionLabel::default()
    }

    pub fn of(emotion: EmotionId, score: f64) -> Self {
        EmotionLabel {
            emotion: Some(emotion),
            score: Some(score),
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.emotion {
            Some(e) => f.write_str(e.name()),
            None => f.write_str("-"),
        }
    }
}

/// A threshold strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, GatewayError> {
        if value > 0.0 && value < 1.0 {
            Ok(Threshold(value))
        } else {
            Err(GatewayError::Config(format!(
                "threshold must be strictly between 0 and 1, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold(DEFAULT_THRESHOLD)
    }
}

/// Highest-scoring emotion if its score is strictly over `threshold`.
/// Ties go to the lowest id.
pub fn dominant_emotion(v: &ScoreVector, threshold: Threshold) -> EmotionLabel {
    let mut best = EmotionId::new(0).unwrap();
    for id in EmotionId::all().skip(1) {
        if v.get(id) > v.get(best) {
            best = id;
        }
    }
    let score = v.get(best);
    if score > threshold.value() {
        EmotionLabel::of(best, score)
    } else {
        EmotionLabel::none()
    }
}

/// A source of emotion score vectors. Implementations return one vector per
/// input text, in input order.
pub trait Classifier: Send + Sync {
    fn name(&self) -> &str;

    fn classify_scores(&self, texts: &[&str]) -> Result<Vec<ScoreVector>, GatewayError>;

    fn classify_labels(
        &self,
        texts: &[&str],
        threshold: Threshold,
    ) -> Result<Vec<EmotionLabel>, GatewayError> {
        Ok(self
            .classify_scores(texts)?
            .iter()
            .map(|v| dominant_emotion(v, threshold))
            .collect())
    }
}

/// Returns a seeded vector for known texts and zeros for everything else.
#[derive(Debug, Clone, Default)]
pub struct FixedClassifier {
    table: HashMap<String, ScoreVector>,
}

impl FixedClassifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, text: &str, scores: &[(EmotionId, f64)]) -> Self {
        self.insert(text, ScoreVector::from_pairs(scores.iter().copied()).unwrap());
        self
    }

    pub fn insert(&mut self, text: &str, scores: ScoreVector) {
        self.table.insert(text.trim().to_string(), scores);
    }

    /// Parses `{"<text>": {"<emotion>": score, ...}, ...}`.
    pub fn from_json(json: &str) -> Result<Self, GatewayError> {
        let raw: HashMap<String, HashMap<String, f64>> =
            serde_json::from_str(json).map_err(|e| GatewayError::Config(e.to_string()))?;
        let mut out = FixedClassifier::new();
        for (text, scores) in raw {
            let pairs = scores
                .into_iter()
                .map(|(name, s)| {
                    EmotionId::from_name(&name)
                        .map(|id| (id, s))
                        .map_err(|e| GatewayError::Config(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let v = ScoreVector::from_pairs(pairs)
                .map_err(|e| GatewayError::Config(e.to_string()))?;
            out.insert(&text, v);
        }
        Ok(out)
    }
}

impl Classifier for FixedClassifier {
    fn name(&self) -> &str {
        "fixed"
    }

    fn classify_scores(&self, texts: &[&str]) -> Result<Vec<ScoreVector>, GatewayError> {
        Ok(texts
            .iter()
            .map(|t| self.table.get(t.trim()).copied().unwrap_or_else(ScoreVector::zeros))
            .collect())
    }
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    scores: Vec<Vec<f64>>,
}

/// `POST {endpoint}/classify` with `{"texts": [...]}`, answered by
/// `{"scores": [[28 floats], ...]}`.
#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    endpoint: RemoteEndpoint,
}

impl RemoteClassifier {
    pub fn new(base_url: &str, options: RemoteOptions) -> Result<Self, GatewayError> {
        Ok(RemoteClassifier {
            endpoint: RemoteEndpoint::new(base_url, "/classify", options)?,
        })
    }
}

impl Classifier for RemoteClassifier {
    fn name(&self) -> &str {
        "remote"
    }

    fn classify_scores(&self, texts: &[&str]) -> Result<Vec<ScoreVector>, GatewayError> {
        let opts = self.endpoint.options();
        run_chunked(texts, opts.batch_size, opts.max_in_flight, |chunk| {
            let resp: ClassifyResponse = self.endpoint.post(&ClassifyRequest { texts: chunk })?;
            resp.scores
                .iter()
                .map(|row| ScoreVector::from_slice(row))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(name: &str) -> EmotionId {
        EmotionId::from_name(name).unwrap()
    }

    #[test]
    fn dominant_examples() {
        let t = Threshold::default();
        let v = ScoreVector::from_pairs([(id("admiration"), 0.62), (id("joy"), 0.4)]).unwrap();
        assert_eq!(dominant_emotion(&v, t), EmotionLabel::of(id("admiration"), 0.62));

        let v = ScoreVector::from_pairs([(id("joy"), 0.5), (id("fear"), 0.3)]).unwrap();
        assert_eq!(dominant_emotion(&v, t), EmotionLabel::none());

        let v = ScoreVector::from_pairs([(id("joy"), 0.7), (id("anger"), 0.7)]).unwrap();
        assert_eq!(dominant_emotion(&v, t).emotion, Some(id("anger")));

        assert_eq!(dominant_emotion(&ScoreVector::zeros(), t), EmotionLabel::none());
    }

    #[test]
    fn threshold_bounds() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(1.0).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
        assert_eq!(Threshold::new(0.3).unwrap().value(), 0.3);
    }

    #[test]
    fn score_vector_contract() {
        assert!(ScoreVector::from_slice(&[0.1; 27]).is_err());
        assert!(ScoreVector::from_slice(&[1.5; 28]).is_err());
        let v: ScoreVector = serde_json::from_str(&serde_json::to_string(&[0.25; 28]).unwrap()).unwrap();
        assert_eq!(v.get(EmotionId::NEUTRAL), 0.25);
        assert!(serde_json::from_str::<ScoreVector>("[0.1, 0.2]").is_err());
    }

    #[test]
    fn fixed_backend_echoes_seed() {
        let c = FixedClassifier::new().with("hi", &[(id("admiration"), 0.9)]);
        let out = c.classify_scores(&["hi", "other"]).unwrap();
        assert_eq!(out[0].get(id("admiration")), 0.9);
        assert_eq!(out[0].as_slice().iter().sum::<f64>(), 0.9);
        assert_eq!(out[1], ScoreVector::zeros());
        let labels = c.classify_labels(&["hi"], Threshold::default()).unwrap();
        assert_eq!(labels[0].emotion, Some(id("admiration")));
    }

    #[test]
    fn fixed_backend_from_json() {
        let c = FixedClassifier::from_json(r#"{"go away": {"anger": 0.8, "Disgust": 0.2}}"#).unwrap();
        let v = c.classify_scores(&["go away"]).unwrap()[0];
        assert_eq!((v.get(id("anger")), v.get(id("disgust"))), (0.8, 0.2));
        assert!(FixedClassifier::from_json(r#"{"x": {"angst": 0.8}}"#).is_err());
        assert!(FixedClassifier::from_json(r#"{"x": {"anger": 1.8}}"#).is_err());
    }

    #[test]
    fn label_serializes_names() {
        let l = EmotionLabel::of(id("anger"), 0.75);
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"emotion":"anger","score":0.75}"#);
        let none: EmotionLabel = serde_json::from_str(r#"{"emotion":null,"score":null}"#).unwrap();
        assert_eq!(none, EmotionLabel::none());
    }
}
