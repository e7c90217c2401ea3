use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, PairRecord, Split};
use crate::graph::TransitionGraph;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPolicy {
    /// Use each record's own tag; untagged records go to train.
    Presplit,
    /// Shuffle with `seed` and put `ratio` of the records in train.
    Random { ratio: f64, seed: u64 },
}

/// Partitions records into (train, test). Each side keeps input order and
/// every output record carries its new split tag.
pub fn split_pairs(
    records: Vec<PairRecord>,
    policy: SplitPolicy,
) -> Result<(Vec<PairRecord>, Vec<PairRecord>), CorpusError> {
    match policy {
        SplitPolicy::Presplit => {
            let (test, train): (Vec<_>, Vec<_>) =
                records.into_iter().partition(|r| r.split == Split::Test);
            let train = train
                .into_iter()
                .map(|mut r| {
                    r.split = Split::Train;
                    r
                })
                .collect();
            Ok((train, test))
        }
        SplitPolicy::Random { ratio, seed } => {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(CorpusError::BadRatio(ratio));
            }
            let n = records.len();
            let n_train = ((ratio * n as f64) + 1e-9).floor() as usize;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let train_idx: HashSet<usize> = order[..n_train].iter().copied().collect();
            let mut train = Vec::with_capacity(n_train);
            let mut test = Vec::with_capacity(n - n_train);
            for (i, mut r) in records.into_iter().enumerate() {
                if train_idx.contains(&i) {
                    r.split = Split::Train;
                    train.push(r);
                } else {
                    r.split = Split::Test;
                    test.push(r);
                }
            }
            Ok((train, test))
        }
    }
}

/// Limited-data configuration: train on the small side, evaluate on the large.
pub fn swap_for_limited_data<T>(train: T, test: T) -> (T, T) {
    (test, train)
}

/// Keeps records whose labeled transition is an edge of `graph`. The kept
/// fraction of an empty input is 1.0.
pub fn restrict_to_graph(
    records: Vec<PairRecord>,
    graph: &TransitionGraph,
) -> (Vec<PairRecord>, f64) {
    let input = records.len();
    let kept: Vec<PairRecord> = records
        .into_iter()
        .filter(|r| match (r.source_label(), r.target_label()) {
            (Some(s), Some(t)) => graph.is_valid_transition(s, t),
            _ => false,
        })
        .collect();
    let fraction = if input == 0 {
        1.0
    } else {
        kept.len() as f64 / input as f64
    };
    (kept, fraction)
}

/// Concatenates record sets, keeping the first record for each id.
/// Returns the merged records and the number of duplicates dropped.
pub fn merge<I>(sets: I) -> (Vec<PairRecord>, usize)
where
    I: IntoIterator<Item = Vec<PairRecord>>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut dupes = 0;
    for set in sets {
        for r in set {
            if seen.insert(r.id.clone()) {
                out.push(r);
            } else {
                dupes += 1;
            }
        }
    }
    (out, dupes)
}
