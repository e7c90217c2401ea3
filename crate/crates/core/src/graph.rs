//! Directed emotion transition graph.
//!
//! Every non-neutral emotion may move to `neutral`; within a cluster an
//! emotion may move to any member with a strictly lower intensity rank.
//! The graph can be replaced by a JSON config whose edge list is re-validated
//! against those rules.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{EmotionId, Taxonomy, TaxonomyError, EMOTION_COUNT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph config parse error: {0}")]
    Parse(String),
    #[error("graph config: {0}")]
    Taxonomy(#[from] TaxonomyError),
    #[error("invariant violation: {0}")]
    Invariant(#[from] Violation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("cross-cluster edge {0} -> {1}")]
    CrossCluster(EmotionId, EmotionId),
    #[error("missing to-neutral edge {0} -> neutral")]
    MissingToNeutral(EmotionId),
    #[error("neutral must have no outgoing edges, found neutral -> {0}")]
    NeutralOutgoing(EmotionId),
    #[error("self edge {0} -> {0}")]
    SelfEdge(EmotionId),
    #[error("edge {0} -> {1} does not lower intensity")]
    NotLowering(EmotionId, EmotionId),
    #[error("duplicate edge {0} -> {1}")]
    Duplicate(EmotionId, EmotionId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rationale {
    WithinClusterLowering,
    WithinClusterRaising,
    ToNeutral,
}

impl Rationale {
    pub fn label(self) -> &'static str {
        match self {
            Rationale::WithinClusterLowering => "within-cluster lowering",
            Rationale::WithinClusterRaising => "within-cluster raising",
            Rationale::ToNeutral => "to-neutral",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionSuggestion {
    pub target: EmotionId,
    pub hops: u32,
    pub rationale: Rationale,
}

/// On-disk graph document. Both sections are optional: a missing `emotions`
/// list means the compiled-in taxonomy, a missing `edges` list means the
/// default lowering closure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_raising: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotions: Option<Vec<EmotionEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmotionEntry {
    pub name: String,
    pub cluster: i64,
    pub intensity_rank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    taxonomy: Taxonomy,
    edges: BTreeSet<(EmotionId, EmotionId)>,
    allow_raising: bool,
}

impl Default for TransitionGraph {
    fn default() -> Self {
        Self::build_default(Taxonomy::default())
    }
}

impl TransitionGraph {
    /// To-neutral edges plus the within-cluster lowering closure.
    pub fn build_default(taxonomy: Taxonomy) -> Self {
        let mut edges = BTreeSet::new();
        for a in taxonomy.emotions() {
            if a.id.is_neutral() {
                continue;
            }
            edges.insert((a.id, EmotionId::NEUTRAL));
            for b in taxonomy.emotions() {
                if a.cluster == b.cluster && a.intensity_rank > b.intensity_rank {
                    edges.insert((a.id, b.id));
                }
            }
        }
        TransitionGraph {
            taxonomy,
            edges,
            allow_raising: false,
        }
    }

    pub fn from_config(config: &GraphConfig) -> Result<Self, GraphError> {
        let taxonomy = match &config.emotions {
            Some(rows) => Taxonomy::from_entries(
                rows.iter()
                    .map(|r| (r.name.as_str(), r.cluster, r.intensity_rank)),
            )?,
            None => Taxonomy::default(),
        };
        let Some(raw_edges) = &config.edges else {
            let mut g = Self::build_default(taxonomy);
            g.allow_raising = config.allow_raising;
            return Ok(g);
        };
        let mut edges = BTreeSet::new();
        for [src, dst] in raw_edges {
            let src = EmotionId::from_name(src)?;
            let dst = EmotionId::from_name(dst)?;
            if !edges.insert((src, dst)) {
                return Err(Violation::Duplicate(src, dst).into());
            }
        }
        let g = TransitionGraph {
            taxonomy,
            edges,
            allow_raising: config.allow_raising,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn load(json: &str) -> Result<Self, GraphError> {
        let config: GraphConfig =
            serde_json::from_str(json).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::from_config(&config)
    }

    /// Checks every structural rule, reporting the first offending edge.
    pub fn validate(&self) -> Result<(), Violation> {
        for &(src, dst) in &self.edges {
            if src == dst {
                return Err(Violation::SelfEdge(src));
            }
            if src.is_neutral() {
                return Err(Violation::NeutralOutgoing(dst));
            }
            if dst.is_neutral() {
                continue;
            }
            let (a, b) = (self.taxonomy.get(src), self.taxonomy.get(dst));
            if a.cluster != b.cluster {
                return Err(Violation::CrossCluster(src, dst));
            }
            if !self.allow_raising && a.intensity_rank <= b.intensity_rank {
                return Err(Violation::NotLowering(src, dst));
            }
        }
        for id in EmotionId::all().filter(|e| !e.is_neutral()) {
            if !self.edges.contains(&(id, EmotionId::NEUTRAL)) {
                return Err(Violation::MissingToNeutral(id));
            }
        }
        Ok(())
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn node_count(&self) -> usize {
        EMOTION_COUNT
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EmotionId, EmotionId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_valid_transition(&self, src: EmotionId, dst: EmotionId) -> bool {
        self.edges.contains(&(src, dst))
    }

    /// Outgoing transitions ordered by hops then id, with neutral last.
    pub fn targets_of(&self, src: EmotionId) -> Vec<TransitionSuggestion> {
        let src_rank = self.taxonomy.get(src).intensity_rank;
        let mut within = Vec::new();
        let mut to_neutral = None;
        let outgoing = self
            .edges
            .range((src, EmotionId::new(0).unwrap())..)
            .take_while(|(s, _)| *s == src);
        for &(_, dst) in outgoing {
            if dst.is_neutral() {
                to_neutral = Some(TransitionSuggestion {
                    target: dst,
                    hops: src_rank + 1,
                    rationale: Rationale::ToNeutral,
                });
                continue;
            }
            let dst_rank = self.taxonomy.get(dst).intensity_rank;
            let rationale = if dst_rank < src_rank {
                Rationale::WithinClusterLowering
            } else {
                Rationale::WithinClusterRaising
            };
            within.push(TransitionSuggestion {
                target: dst,
                hops: src_rank.abs_diff(dst_rank),
                rationale,
            });
        }
        within.sort_by_key(|s| (s.hops, s.target));
        within.extend(to_neutral);
        within
    }

    /// The graph as a config document with an explicit edge list.
    pub fn to_config(&self) -> GraphConfig {
        GraphConfig {
            allow_raising: self.allow_raising,
            emotions: Some(
                self.taxonomy
                    .emotions()
                    .iter()
                    .map(|e| EmotionEntry {
                        name: e.name.to_string(),
                        cluster: e.cluster as i64,
                        intensity_rank: e.intensity_rank,
                    })
                    .collect(),
            ),
            edges: Some(
                self.edges
                    .iter()
                    .map(|(s, d)| [s.name().to_string(), d.name().to_string()])
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_config())
            .expect("graph config is always serializable");
        s.push('\n');
        s
    }

    /// True if the non-neutral edge relation has no cycle.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over all nodes.
        let mut indegree = [0usize; EMOTION_COUNT];
        for (_, d) in self.edges() {
            indegree[d.index()] += 1;
        }
        let mut ready: Vec<EmotionId> =
            EmotionId::all().filter(|e| indegree[e.index()] == 0).collect();
        let mut seen = 0;
        while let Some(n) = ready.pop() {
            seen += 1;
            for (_, d) in self.edges().filter(|(s, _)| *s == n) {
                indegree[d.index()] -= 1;
                if indegree[d.index()] == 0 {
                    ready.push(d);
                }
            }
        }
        seen == EMOTION_COUNT
    }
}
