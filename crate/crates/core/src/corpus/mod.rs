//! Paraphrase corpus preparation: ingestion, emotion labeling, drop filters,
//! train/test splits, transition-graph restriction and JSONL export.

mod filter;
mod ingest;
mod split;
mod stats;

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use filter::{drop_reason, filter_pairs, DropReason, FilterOptions, FilterStats};
pub use ingest::{ingest, ingest_reader, Format, Ingested};
pub use split::{
    merge, restrict_to_graph, split_pairs, swap_for_limited_data, SplitPolicy, DEFAULT_SEED,
};
pub use stats::{stats, CorpusStats};

use crate::classifier::{Classifier, EmotionLabel, Threshold};
use crate::gateway::GatewayError;
use crate::taxonomy::EmotionId;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown corpus format `{0}` (expected paws, mrpc, qqp, twitter-url or generic)")]
    UnknownFormat(String),
    #[error("invalid record {id}: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("labeling records {first}..{last}: {source}")]
    Gateway {
        first: String,
        last: String,
        #[source]
        source: GatewayError,
    },
    #[error("split ratio must be strictly between 0 and 1, got {0}")]
    BadRatio(f64),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Paws,
    Mrpc,
    Qqp,
    TwitterUrl,
    #[default]
    Generic,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Paws => "paws",
            Origin::Mrpc => "mrpc",
            Origin::Qqp => "qqp",
            Origin::TwitterUrl => "twitter-url",
            Origin::Generic => "generic",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    #[default]
    Unsplit,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Unsplit => "unsplit",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "unsplit" => Ok(Split::Unsplit),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Paraphrase-validity votes from human raters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterVotes {
    pub yes: u32,
    pub total: u32,
}

impl RaterVotes {
    /// Strict majority: 3 of 6 is not a majority.
    pub fn is_majority(self) -> bool {
        self.yes * 2 > self.total
    }
}

/// A paraphrase pair. Emotion fields are `None` until the pair is labeled; a
/// labeled pair with no dominant emotion carries an empty [`EmotionLabel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub source: String,
    pub target: String,
    pub source_emotion: Option<EmotionLabel>,
    pub target_emotion: Option<EmotionLabel>,
    pub pwi: Option<f64>,
    pub rater_votes: Option<RaterVotes>,
    #[serde(default)]
    pub origin: Origin,
    #[serde(default)]
    pub split: Split,
}

impl PairRecord {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        PairRecord {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            source_emotion: None,
            target_emotion: None,
            pwi: None,
            rater_votes: None,
            origin: Origin::Generic,
            split: Split::Unsplit,
        }
    }

    pub fn with_labels(mut self, source: EmotionLabel, target: EmotionLabel) -> Self {
        self.source_emotion = Some(source);
        self.target_emotion = Some(target);
        self
    }

    pub fn source_label(&self) -> Option<EmotionId> {
        self.source_emotion.and_then(|l| l.emotion)
    }

    pub fn target_label(&self) -> Option<EmotionId> {
        self.target_emotion.and_then(|l| l.emotion)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: &str| CorpusError::InvalidRecord {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.id.is_empty() {
            return Err(invalid("empty id"));
        }
        if self.source.trim().is_empty() || self.target.trim().is_empty() {
            return Err(invalid("source and target must be non-empty"));
        }
        if let Some(p) = self.pwi {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid("pwi must lie in [0, 1]"));
            }
        }
        if let Some(v) = self.rater_votes {
            if v.total == 0 || v.yes > v.total {
                return Err(invalid("rater votes must satisfy 0 <= yes <= total, total > 0"));
            }
        }
        Ok(())
    }
}

/// Fills both emotion labels of every record, preserving order.
pub fn label_pairs(
    records: Vec<PairRecord>,
    classifier: &dyn Classifier,
    threshold: Threshold,
) -> Result<Vec<PairRecord>, CorpusError> {
    const CHUNK: usize = 512;
    let mut out = Vec::with_capacity(records.len());
    let mut iter = records.into_iter().peekable();
    while iter.peek().is_some() {
        let mut chunk: Vec<PairRecord> = iter.by_ref().take(CHUNK).collect();
        let texts: Vec<&str> = chunk
            .iter()
            .flat_map(|r| [r.source.as_str(), r.target.as_str()])
            .collect();
        let labels = classifier
            .classify_labels(&texts, threshold)
            .map_err(|source| CorpusError::Gateway {
                first: chunk[0].id.clone(),
                last: chunk[chunk.len() - 1].id.clone(),
                source,
            })?;
        for (r, pair) in chunk.iter_mut().zip(labels.chunks(2)) {
            r.source_emotion = Some(pair[0]);
            r.target_emotion = Some(pair[1]);
        }
        out.extend(chunk);
    }
    Ok(out)
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(records: &[PairRecord], mut out: W) -> std::io::Result<usize> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(records.len())
}

pub fn export(records: &[PairRecord], path: &Path) -> Result<usize, CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    write_jsonl(records, BufWriter::new(file)).map_err(|e| CorpusError::io(path, e))
}

/// Reads canonical JSONL strictly: any bad line is an error.
pub fn read_jsonl(path: &Path) -> Result<Vec<PairRecord>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PairRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::InvalidRecord {
                id: format!("{}:{}", path.display(), i + 1),
                reason: e.to_string(),
            })?;
        r.validate()?;
        out.push(r);
    }
    Ok(out)
}
