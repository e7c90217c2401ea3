//! Evaluation harness: prefix-encode each labeled pair, generate, re-classify
//! the prediction, and score the run with all seven metrics.

mod cache;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use cache::{CacheEntry, CacheKey, EvalCache};
pub use report::{compare, Cell, EvalReport};

use crate::classifier::{Classifier, EmotionLabel, Threshold};
use crate::corpus::{restrict_to_graph, PairRecord};
use crate::gateway::GatewayError;
use crate::generator::{Generator, DEFAULT_MAX_LENGTH};
use crate::graph::TransitionGraph;
use crate::metrics::{self, MetricError, MetricName, MetricValue, TokenSeq};
use crate::prefix::{self, PrefixError, TransitionPrefix};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no pairs left after restricting to the transition graph")]
    EmptyAfterRestriction,
    #[error("pair {0} is missing an emotion label")]
    MissingLabels(String),
    #[error("pair {id}: {source}")]
    Prefix {
        id: String,
        #[source]
        source: PrefixError,
    },
    #[error("{completed} of {total} pairs completed before {stage} failed: {source}")]
    Gateway {
        stage: &'static str,
        completed: usize,
        total: usize,
        #[source]
        source: GatewayError,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

/// Evaluation set names. Anything else is kept verbatim as a custom name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetName {
    Twit0825,
    Mix,
    Combined,
    Custom(String),
}

impl DatasetName {
    pub fn as_str(&self) -> &str {
        match self {
            DatasetName::Twit0825 => "twit0.825",
            DatasetName::Mix => "mix",
            DatasetName::Combined => "combined",
            DatasetName::Custom(s) => s,
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s {
            "" => return Err("dataset name must not be empty".into()),
            "twit0.825" => DatasetName::Twit0825,
            "mix" => DatasetName::Mix,
            "combined" => DatasetName::Combined,
            other => DatasetName::Custom(other.to_string()),
        })
    }
}

impl Serialize for DatasetName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for DatasetName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Which text the paraphrase metrics compare the prediction against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceMode {
    #[default]
    Target,
    Input,
}

impl ReferenceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceMode::Target => "target",
            ReferenceMode::Input => "input",
        }
    }
}

impl fmt::Display for ReferenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferenceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "target" => Ok(ReferenceMode::Target),
            "input" => Ok(ReferenceMode::Input),
            _ => Err(format!("unknown reference mode {s:?} (expected target or input)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub model_name: String,
    pub dataset_name: DatasetName,
    pub restricted: bool,
    pub reference: ReferenceMode,
    pub threshold: Threshold,
    pub max_length: usize,
    /// Pairs per generate/classify round trip; also the cache flush interval.
    pub batch_size: usize,
}

impl EvalOptions {
    pub fn new(model_name: impl Into<String>, dataset_name: DatasetName) -> Self {
        EvalOptions {
            model_name: model_name.into(),
            dataset_name,
            restricted: false,
            reference: ReferenceMode::Target,
            threshold: Threshold::default(),
            max_length: DEFAULT_MAX_LENGTH,
            batch_size: 64,
        }
    }
}

/// Scoring conventions recorded alongside each run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub reference: ReferenceMode,
    pub meteor_stages: Vec<String>,
    pub rouge_aggregation: String,
    pub bleu_smoothing: String,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    pub model_name: String,
    pub dataset_name: DatasetName,
    pub restricted: bool,
    pub metrics: Vec<MetricValue>,
    pub pair_count: usize,
    pub timestamp: String,
    pub metadata: RunMetadata,
}

impl EvalRun {
    pub fn metric(&self, name: MetricName) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

/// Per-pair result of an evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub id: String,
    pub input: String,
    pub prediction: String,
    pub predicted: EmotionLabel,
    pub target: EmotionLabel,
    pub reference: String,
}

/// Runs the harness over labeled pairs. With a cache, pairs already present
/// are not sent to the backends again and new results are stored after each
/// batch, so an interrupted run resumes where it stopped.
pub fn evaluate(
    dataset: &[PairRecord],
    generator: &dyn Generator,
    classifier: &dyn Classifier,
    graph: &TransitionGraph,
    opts: &EvalOptions,
    mut cache: Option<&mut EvalCache>,
) -> Result<(EvalRun, Vec<PairOutcome>), EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    for r in dataset {
        if r.source_label().is_none() || r.target_label().is_none() {
            return Err(EvalError::MissingLabels(r.id.clone()));
        }
    }
    let pairs = if opts.restricted {
        let (kept, _) = restrict_to_graph(dataset.to_vec(), graph);
        if kept.is_empty() {
            return Err(EvalError::EmptyAfterRestriction);
        }
        kept
    } else {
        dataset.to_vec()
    };

    let mut lines = Vec::with_capacity(pairs.len());
    for r in &pairs {
        let p = TransitionPrefix::by_id(r.source_label().unwrap(), r.target_label().unwrap());
        let line = prefix::encode(p, &r.source).map_err(|source| EvalError::Prefix {
            id: r.id.clone(),
            source,
        })?;
        lines.push(line);
    }

    let total = pairs.len();
    let mut results: Vec<Option<(String, EmotionLabel)>> = pairs
        .iter()
        .map(|r| {
            let key = CacheKey::new(&opts.model_name, &r.id, opts.reference);
            cache.as_deref().and_then(|c| c.get(&key)).map(|e| (e.prediction.clone(), e.predicted))
        })
        .collect();
    let cached = results.iter().filter(|r| r.is_some()).count();
    if cached > 0 {
        log::info!("{cached} of {total} pairs served from cache");
    }

    let pending: Vec<usize> = (0..total).filter(|&i| results[i].is_none()).collect();
    let mut completed = cached;
    for batch in pending.chunks(opts.batch_size.max(1)) {
        let inputs: Vec<&str> = batch.iter().map(|&i| lines[i].as_str()).collect();
        let generated = generator
            .generate_batch(&inputs, opts.max_length)
            .map_err(|source| EvalError::Gateway {
                stage: "generation",
                completed,
                total,
                source,
            })?;
        let predictions: Vec<&str> = generated.iter().map(|g| g.output.as_str()).collect();
        let labels = classifier
            .classify_labels(&predictions, opts.threshold)
            .map_err(|source| EvalError::Gateway {
                stage: "classification",
                completed,
                total,
                source,
            })?;
        let mut fresh = Vec::with_capacity(batch.len());
        for ((&i, g), label) in batch.iter().zip(&generated).zip(labels) {
            results[i] = Some((g.output.clone(), label));
            fresh.push(CacheEntry {
                key: CacheKey::new(&opts.model_name, &pairs[i].id, opts.reference),
                prediction: g.output.clone(),
                predicted: label,
            });
        }
        if let Some(c) = cache.as_deref_mut() {
            c.append(fresh)?;
        }
        completed += batch.len();
    }

    let outcomes: Vec<PairOutcome> = pairs
        .iter()
        .zip(lines)
        .zip(results)
        .map(|((r, input), res)| {
            let (prediction, predicted) = res.expect("every pair resolved");
            let reference = match opts.reference {
                ReferenceMode::Target => r.target.clone(),
                ReferenceMode::Input => r.source.clone(),
            };
            PairOutcome {
                id: r.id.clone(),
                input,
                prediction,
                predicted,
                target: r.target_emotion.unwrap_or_default(),
                reference,
            }
        })
        .collect();

    let corpus: Vec<(TokenSeq, TokenSeq)> = outcomes
        .iter()
        .map(|o| (metrics::tokenize(&o.prediction), metrics::tokenize(&o.reference)))
        .collect();
    let pred: Vec<EmotionLabel> = outcomes.iter().map(|o| o.predicted).collect();
    let target: Vec<EmotionLabel> = outcomes.iter().map(|o| o.target).collect();
    let values = metrics::score_all(&corpus, &pred, &target)?;

    let run = EvalRun {
        model_name: opts.model_name.clone(),
        dataset_name: opts.dataset_name.clone(),
        restricted: opts.restricted,
        metrics: values,
        pair_count: total,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        metadata: RunMetadata {
            reference: opts.reference,
            meteor_stages: metrics::MeteorOptions::default()
                .stages()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            rouge_aggregation: "mean of per-pair F1".into(),
            bleu_smoothing: "none".into(),
            threshold: opts.threshold.value(),
        },
    };
    Ok((run, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::FixedClassifier;
    use crate::generator::{EchoGenerator, TargetOracleGenerator};
    use crate::taxonomy::EmotionId;

    fn id(name: &str) -> EmotionId {
        EmotionId::from_name(name).unwrap()
    }

    fn record(i: usize, src: &str, tgt: &str, s: EmotionId, t: EmotionId) -> PairRecord {
        PairRecord::new(format!("p{i}"), src, tgt)
            .with_labels(EmotionLabel::of(s, 0.9), EmotionLabel::of(t, 0.9))
    }

    fn fixture() -> (Vec<PairRecord>, FixedClassifier) {
        let data = vec![
            record(0, "you never listen", "you rarely listen", id("anger"), id("annoyance")),
            record(1, "this is awful", "this is not great", id("disgust"), id("neutral")),
        ];
        let clf = FixedClassifier::new()
            .with("you rarely listen", &[(id("annoyance"), 0.8)])
            .with("this is not great", &[(id("neutral"), 0.7)]);
        (data, clf)
    }

    #[test]
    fn oracle_run_scores_perfectly() {
        let (data, clf) = fixture();
        let gen = TargetOracleGenerator::from_records(&data);
        let opts = EvalOptions::new("oracle", DatasetName::Mix);
        let (run, outcomes) =
            evaluate(&data, &gen, &clf, &TransitionGraph::default(), &opts, None).unwrap();
        assert_eq!(run.pair_count, 2);
        assert_eq!(run.metrics.len(), 7);
        assert_eq!(run.metric(MetricName::ExactMatch), Some(1.0));
        assert_eq!(run.metric(MetricName::Rouge1), Some(1.0));
        assert_eq!(outcomes[0].input, "2 to 3: you never listen");
    }

    #[test]
    fn echo_run_misses_target_emotion() {
        let (data, clf) = fixture();
        let opts = EvalOptions::new("echo", DatasetName::Mix);
        let (run, _) =
            evaluate(&data, &EchoGenerator, &clf, &TransitionGraph::default(), &opts, None).unwrap();
        assert_eq!(run.metric(MetricName::ExactMatch), Some(0.0));
    }

    #[test]
    fn restriction_can_empty_the_dataset() {
        let data = vec![record(0, "a", "b", id("annoyance"), id("anger"))];
        let mut opts = EvalOptions::new("echo", DatasetName::Mix);
        opts.restricted = true;
        let err = evaluate(
            &data,
            &EchoGenerator,
            &FixedClassifier::new(),
            &TransitionGraph::default(),
            &opts,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::EmptyAfterRestriction));
    }

    #[test]
    fn unlabeled_pairs_are_rejected() {
        let data = vec![PairRecord::new("x", "a", "b")];
        let opts = EvalOptions::new("echo", DatasetName::Mix);
        let err = evaluate(
            &data,
            &EchoGenerator,
            &FixedClassifier::new(),
            &TransitionGraph::default(),
            &opts,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::MissingLabels(ref i) if i == "x"));
    }

    #[test]
    fn dataset_names() {
        assert_eq!("twit0.825".parse::<DatasetName>().unwrap(), DatasetName::Twit0825);
        assert_eq!(
            "holdout".parse::<DatasetName>().unwrap(),
            DatasetName::Custom("holdout".into())
        );
        assert!("".parse::<DatasetName>().is_err());
    }
}
