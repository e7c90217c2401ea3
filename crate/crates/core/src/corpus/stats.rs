use std::collections::BTreeMap;

use serde::Serialize;

use super::PairRecord;
use crate::graph::TransitionGraph;

/// Summary counts over a record set. Maps are keyed by name so the JSON
/// output is sorted and stable.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CorpusStats {
    pub total: usize,
    pub by_origin: BTreeMap<String, usize>,
    pub by_split: BTreeMap<String, usize>,
    pub unlabeled: usize,
    pub source_emotions: BTreeMap<String, usize>,
    pub target_emotions: BTreeMap<String, usize>,
    pub transitions: BTreeMap<String, usize>,
    pub graph_valid: usize,
    pub with_pwi: usize,
    pub with_rater_votes: usize,
}

pub fn stats(records: &[PairRecord], graph: &TransitionGraph) -> CorpusStats {
    let mut s = CorpusStats {
        total: records.len(),
        ..CorpusStats::default()
    };
    let name = |l: Option<crate::taxonomy::EmotionId>| l.map_or("none", |e| e.name());
    for r in records {
        *s.by_origin.entry(r.origin.to_string()).or_default() += 1;
        *s.by_split.entry(r.split.to_string()).or_default() += 1;
        s.with_pwi += r.pwi.is_some() as usize;
        s.with_rater_votes += r.rater_votes.is_some() as usize;
        if r.source_emotion.is_none() || r.target_emotion.is_none() {
            s.unlabeled += 1;
            continue;
        }
        let (src, tgt) = (r.source_label(), r.target_label());
        *s.source_emotions.entry(name(src).into()).or_default() += 1;
        *s.target_emotions.entry(name(tgt).into()).or_default() += 1;
        if let (Some(a), Some(b)) = (src, tgt) {
            *s.transitions
                .entry(format!("{} -> {}", a.name(), b.name()))
                .or_default() += 1;
            s.graph_valid += graph.is_valid_transition(a, b) as usize;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::EmotionLabel;
    use crate::taxonomy::EmotionId;

    #[test]
    fn counts_labels_and_transitions() {
        let l = |n: &str| EmotionLabel::of(EmotionId::from_name(n).unwrap(), 0.9);
        let recs = vec![
            PairRecord::new("1", "a", "b").with_labels(l("anger"), l("annoyance")),
            PairRecord::new("2", "a", "b").with_labels(l("annoyance"), l("anger")),
            PairRecord::new("3", "a", "b").with_labels(l("joy"), EmotionLabel::none()),
            PairRecord::new("4", "a", "b"),
        ];
        let s = stats(&recs, &TransitionGraph::default());
        assert_eq!(s.total, 4);
        assert_eq!(s.unlabeled, 1);
        assert_eq!(s.graph_valid, 1);
        assert_eq!(s.transitions.len(), 2);
        assert_eq!(s.target_emotions["none"], 1);
        assert_eq!(s.by_origin["generic"], 4);
    }
}
