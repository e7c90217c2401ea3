//! The 28-emotion vocabulary and its 11 intensity clusters.
//!
//! Ids follow the alphabetical ordering of the 27 non-neutral emotions with
//! `neutral` appended as id 27. Cluster membership is fixed; intensity ranks
//! have compiled-in defaults and may be overridden through a graph config.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const EMOTION_COUNT: usize = 28;
pub const CLUSTER_COUNT: u8 = 11;
pub const NEUTRAL_CLUSTER: u8 = 1;

/// Canonical names indexed by id.
pub const EMOTION_NAMES: [&str; EMOTION_COUNT] = [
    "admiration",
    "amusement",
    "anger",
    "annoyance",
    "approval",
    "caring",
    "confusion",
    "curiosity",
    "desire",
    "disappointment",
    "disapproval",
    "disgust",
    "embarrassment",
    "excitement",
    "fear",
    "gratitude",
    "grief",
    "joy",
    "love",
    "nervousness",
    "optimism",
    "pride",
    "realization",
    "relief",
    "remorse",
    "sadness",
    "surprise",
    "neutral",
];

/// Cluster rows, most intense member first. Position from the end is the
/// default intensity rank.
const DEFAULT_CLUSTERS: [&[&str]; CLUSTER_COUNT as usize] = [
    &["neutral"],
    &["love", "excitement", "joy", "amusement"],
    &["desire", "caring", "optimism"],
    &["pride", "admiration"],
    &["gratitude", "relief"],
    &["approval", "realization"],
    &["surprise", "confusion", "curiosity"],
    &["fear", "nervousness"],
    &["remorse", "embarrassment"],
    &["grief", "sadness", "disappointment"],
    &["anger", "disgust", "annoyance", "disapproval"],
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("unknown emotion `{0}`")]
    UnknownName(String),
    #[error("emotion id {0} is out of range 0..=27")]
    UnknownId(i64),
    #[error("cluster {0} is out of range 1..=11")]
    ClusterOutOfRange(i64),
    #[error("emotion `{name}` belongs to cluster {expected}, not {found}")]
    WrongCluster {
        name: &'static str,
        expected: u8,
        found: u8,
    },
    #[error("emotion `{0}` is listed more than once")]
    Duplicate(&'static str),
    #[error("emotion `{0}` is missing")]
    Missing(&'static str),
    #[error("emotions `{0}` and `{1}` share intensity rank {2} in cluster {3}")]
    RankCollision(&'static str, &'static str, u32, u8),
}

/// Index into the canonical emotion list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmotionId(u8);

impl EmotionId {
    pub const NEUTRAL: EmotionId = EmotionId(27);

    pub fn new(value: i64) -> Result<Self, TaxonomyError> {
        if (0..EMOTION_COUNT as i64).contains(&value) {
            Ok(EmotionId(value as u8))
        } else {
            Err(TaxonomyError::UnknownId(value))
        }
    }

    pub fn from_name(name: &str) -> Result<Self, TaxonomyError> {
        let wanted = name.trim().to_lowercase();
        EMOTION_NAMES
            .iter()
            .position(|n| *n == wanted)
            .map(|i| EmotionId(i as u8))
            .ok_or_else(|| TaxonomyError::UnknownName(name.to_string()))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        EMOTION_NAMES[self.index()]
    }

    pub fn is_neutral(self) -> bool {
        self == Self::NEUTRAL
    }

    pub fn all() -> impl Iterator<Item = EmotionId> {
        (0..EMOTION_COUNT as u8).map(EmotionId)
    }

    /// Cluster from the fixed grouping; independent of rank overrides.
    pub fn cluster(self) -> u8 {
        default_placement(self.name()).0
    }
}

impl fmt::Display for EmotionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionId {
    type Err = TaxonomyError;

    /// Accepts either a name or a decimal id.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.parse::<i64>() {
            Ok(v) => EmotionId::new(v),
            Err(_) => EmotionId::from_name(t),
        }
    }
}

impl Serialize for EmotionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EmotionId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Id(i64),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Id(v) => EmotionId::new(v),
            Repr::Name(n) => EmotionId::from_name(&n),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Emotion {
    pub id: EmotionId,
    pub name: &'static str,
    pub cluster: u8,
    /// 0 is closest to neutral within the cluster.
    pub intensity_rank: u32,
}

fn default_placement(name: &str) -> (u8, u32) {
    for (ci, row) in DEFAULT_CLUSTERS.iter().enumerate() {
        if let Some(pos) = row.iter().position(|n| *n == name) {
            return ((ci + 1) as u8, (row.len() - 1 - pos) as u32);
        }
    }
    unreachable!("every canonical name is placed in a cluster")
}

/// The full emotion table, indexed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    emotions: Vec<Emotion>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        let emotions = EmotionId::all()
            .map(|id| {
                let (cluster, intensity_rank) = default_placement(id.name());
                Emotion {
                    id,
                    name: id.name(),
                    cluster,
                    intensity_rank,
                }
            })
            .collect();
        Taxonomy { emotions }
    }
}

impl Taxonomy {
    /// Builds a taxonomy from `(name, cluster, intensity_rank)` rows covering
    /// all 28 emotions. Clusters must match the fixed grouping.
    pub fn from_entries<'a, I>(entries: I) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = (&'a str, i64, u32)>,
    {
        let mut slots: Vec<Option<Emotion>> = vec![None; EMOTION_COUNT];
        for (name, cluster, rank) in entries {
            let id = EmotionId::from_name(name)?;
            if !(1..=CLUSTER_COUNT as i64).contains(&cluster) {
                return Err(TaxonomyError::ClusterOutOfRange(cluster));
            }
            let expected = id.cluster();
            if cluster as u8 != expected {
                return Err(TaxonomyError::WrongCluster {
                    name: id.name(),
                    expected,
                    found: cluster as u8,
                });
            }
            let slot = &mut slots[id.index()];
            if slot.is_some() {
                return Err(TaxonomyError::Duplicate(id.name()));
            }
            *slot = Some(Emotion {
                id,
                name: id.name(),
                cluster: expected,
                intensity_rank: rank,
            });
        }
        let emotions = slots
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or(TaxonomyError::Missing(EMOTION_NAMES[i])))
            .collect::<Result<Vec<_>, _>>()?;
        let taxonomy = Taxonomy { emotions };
        taxonomy.check_ranks()?;
        Ok(taxonomy)
    }

    fn check_ranks(&self) -> Result<(), TaxonomyError> {
        for a in &self.emotions {
            for b in &self.emotions {
                if a.id < b.id && a.cluster == b.cluster && a.intensity_rank == b.intensity_rank
                {
                    return Err(TaxonomyError::RankCollision(
                        a.name,
                        b.name,
                        a.intensity_rank,
                        a.cluster,
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn emotions(&self) -> &[Emotion] {
        &self.emotions
    }

    pub fn get(&self, id: EmotionId) -> &Emotion {
        &self.emotions[id.index()]
    }

    /// Case-insensitive, whitespace-trimmed lookup.
    pub fn by_name(&self, name: &str) -> Result<&Emotion, TaxonomyError> {
        EmotionId::from_name(name).map(|id| self.get(id))
    }

    pub fn by_id(&self, id: i64) -> Result<&Emotion, TaxonomyError> {
        EmotionId::new(id).map(|id| self.get(id))
    }

    /// Members of `cluster`, most intense first.
    pub fn cluster_members(&self, cluster: i64) -> Result<Vec<&Emotion>, TaxonomyError> {
        if !(1..=CLUSTER_COUNT as i64).contains(&cluster) {
            return Err(TaxonomyError::ClusterOutOfRange(cluster));
        }
        let mut members: Vec<&Emotion> = self
            .emotions
            .iter()
            .filter(|e| e.cluster as i64 == cluster)
            .collect();
        members.sort_by_key(|e| std::cmp::Reverse(e.intensity_rank));
        Ok(members)
    }
}
