//! METEOR with exact and Porter-stem matching stages.
//!
//! Alignment rules: the number of exact matches is maximal, then the number
//! of stem matches among the remaining words is maximal, and among all
//! alignments meeting both the one with the fewest chunks is used. Scoring:
//! `Fmean = 10PR / (R + 9P)`, `Penalty = 0.5 (chunks / m)^3`,
//! `score = Fmean (1 - Penalty)`.

use std::collections::HashMap;

use rustc_hash::FxHashMap;

use serde::Serialize;

use super::rouge::mean;
use super::{MetricError, TokenSeq};

/// Memo entries explored before falling back to the greedy aligner.
const SEARCH_BUDGET: usize = 250_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeteorOptions {
    pub stem_stage: bool,
}

impl Default for MeteorOptions {
    fn default() -> Self {
        MeteorOptions { stem_stage: true }
    }
}

impl MeteorOptions {
    pub fn stages(&self) -> &'static [&'static str] {
        if self.stem_stage {
            &["exact", "stem"]
        } else {
            &["exact"]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// (hypothesis index, reference index), ascending by hypothesis index.
    pub pairs: Vec<(usize, usize)>,
    pub exact: usize,
    pub chunks: usize,
    /// False when the exact search exceeded its budget and greedy was used.
    pub optimal: bool,
}

pub fn stem(word: &str) -> String {
    porter_stemmer::stem(word)
}

/// Number of chunks in an alignment sorted by hypothesis index.
pub fn count_chunks(pairs: &[(usize, usize)]) -> usize {
    pairs
        .iter()
        .enumerate()
        .filter(|(k, &(i, j))| {
            *k == 0 || {
                let (pi, pj) = pairs[k - 1];
                !(i == pi + 1 && j == pj + 1)
            }
        })
        .count()
}

/// Score from alignment statistics.
pub fn meteor_formula(matches: usize, hyp_len: usize, ref_len: usize, chunks: usize) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let precision = m / hyp_len as f64;
    let recall = m / ref_len as f64;
    let fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks as f64 / m).powi(3);
    fmean * (1.0 - penalty)
}

pub fn meteor_pair(hyp: &[String], reference: &[String], opts: MeteorOptions) -> f64 {
    let a = align(hyp, reference, opts);
    meteor_formula(a.pairs.len(), hyp.len(), reference.len(), a.chunks)
}

pub fn meteor(corpus: &[(TokenSeq, TokenSeq)]) -> Result<f64, MetricError> {
    meteor_with(corpus, MeteorOptions::default())
}

pub fn meteor_with(
    corpus: &[(TokenSeq, TokenSeq)],
    opts: MeteorOptions,
) -> Result<f64, MetricError> {
    mean(corpus, |h, r| meteor_pair(h, r, opts))
}

struct Problem {
    /// Per hypothesis word: (reference index, is exact match).
    candidates: Vec<Vec<(usize, bool)>>,
    target_exact: usize,
    target_total: usize,
    words: usize,
    ref_type_count: Vec<usize>,
    ref_group_count: Vec<usize>,
    /// Reference positions of each word type and stem group.
    ref_type_mask: Vec<Used>,
    ref_group_mask: Vec<Used>,
    /// Type and stem-group counts of `hyp[i..]`, for each `i`.
    suffix_type: Vec<Vec<usize>>,
    suffix_group: Vec<Vec<usize>>,
}

fn intern<'a>(table: &mut HashMap<&'a str, usize>, key: &'a str) -> usize {
    let next = table.len();
    *table.entry(key).or_insert(next)
}

fn suffix_counts(ids: &[usize], kinds: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; kinds]; ids.len() + 1];
    for i in (0..ids.len()).rev() {
        out[i] = out[i + 1].clone();
        out[i][ids[i]] += 1;
    }
    out
}

fn tally(ids: &[usize], kinds: usize) -> Vec<usize> {
    let mut out = vec![0; kinds];
    for &t in ids {
        out[t] += 1;
    }
    out
}

fn masks(ids: &[usize], kinds: usize) -> Vec<Used> {
    let mut out = vec![Used::empty(ids.len()); kinds];
    for (j, &k) in ids.iter().enumerate() {
        out[k] = out[k].with(j);
    }
    out
}

impl Problem {
    fn new(hyp: &[String], reference: &[String], opts: MeteorOptions) -> Self {
        // Without the stem stage every word is its own group.
        let group_key = |w: &String| if opts.stem_stage { stem(w) } else { w.clone() };
        let hyp_stems: Vec<String> = hyp.iter().map(group_key).collect();
        let ref_stems: Vec<String> = reference.iter().map(group_key).collect();

        let mut types = HashMap::new();
        let hyp_type: Vec<usize> = hyp.iter().map(|w| intern(&mut types, w)).collect();
        let ref_type: Vec<usize> = reference.iter().map(|w| intern(&mut types, w)).collect();
        let mut groups = HashMap::new();
        let hyp_group: Vec<usize> = hyp_stems.iter().map(|w| intern(&mut groups, w)).collect();
        let ref_group: Vec<usize> = ref_stems.iter().map(|w| intern(&mut groups, w)).collect();
        let (n_types, n_groups) = (types.len(), groups.len());

        let hyp_type_count = tally(&hyp_type, n_types);
        let ref_type_count = tally(&ref_type, n_types);
        let hyp_group_count = tally(&hyp_group, n_groups);
        let ref_group_count = tally(&ref_group, n_groups);
        let max_matching = |a: &[usize], b: &[usize]| -> usize {
            a.iter().zip(b).map(|(x, y)| *x.min(y)).sum()
        };
        // Within a stem group every hypothesis word can pair with every
        // reference word, so both maxima are sums of per-kind minima.
        let target_exact = max_matching(&hyp_type_count, &ref_type_count);
        let target_total = max_matching(&hyp_group_count, &ref_group_count);

        let candidates = (0..hyp.len())
            .map(|i| {
                (0..reference.len())
                    .filter(|&j| hyp_group[i] == ref_group[j])
                    .map(|j| (j, hyp_type[i] == ref_type[j]))
                    .collect()
            })
            .collect();

        Problem {
            candidates,
            target_exact,
            target_total,
            words: reference.len(),
            suffix_type: suffix_counts(&hyp_type, n_types),
            suffix_group: suffix_counts(&hyp_group, n_groups),
            ref_type_mask: masks(&ref_type, n_types),
            ref_group_mask: masks(&ref_group, n_groups),
            ref_type_count,
            ref_group_count,
        }
    }

    /// Upper bounds on further exact and total matches from state `st`.
    fn reachable(&self, st: &State) -> (usize, usize) {
        let bound = |suffix: &[usize], count: &[usize], mask: &[Used]| -> usize {
            suffix
                .iter()
                .zip(count)
                .zip(mask)
                .map(|((&s, &c), m)| s.min(c - st.used.overlap(m)))
                .sum()
        };
        (
            bound(&self.suffix_type[st.i], &self.ref_type_count, &self.ref_type_mask),
            bound(&self.suffix_group[st.i], &self.ref_group_count, &self.ref_group_mask),
        )
    }
}

/// Set of reference positions. Inline for references up to 128 words.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Used {
    Small(u128),
    Large(Box<[u64]>),
}

impl Used {
    fn empty(words: usize) -> Self {
        if words <= 128 {
            Used::Small(0)
        } else {
            Used::Large(vec![0; words.div_ceil(64)].into_boxed_slice())
        }
    }

    fn has(&self, j: usize) -> bool {
        match self {
            Used::Small(bits) => bits & (1 << j) != 0,
            Used::Large(words) => words[j / 64] & (1 << (j % 64)) != 0,
        }
    }

    fn with(&self, j: usize) -> Self {
        match self {
            Used::Small(bits) => Used::Small(bits | (1 << j)),
            Used::Large(words) => {
                let mut words = words.clone();
                words[j / 64] |= 1 << (j % 64);
                Used::Large(words)
            }
        }
    }

    /// Number of positions present in both sets.
    fn overlap(&self, other: &Used) -> usize {
        match (self, other) {
            (Used::Small(a), Used::Small(b)) => (a & b).count_ones() as usize,
            (Used::Large(a), Used::Large(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| (x & y).count_ones() as usize).sum()
            }
            _ => unreachable!("sets over the same reference share a representation"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    i: usize,
    prev: Option<usize>,
    exact: usize,
    used: Used,
}

/// Best remaining chunk count and the choice achieving it: `None` to skip
/// the word, or the reference position and whether it is an exact match.
type Choice = Option<(usize, Option<(usize, bool)>)>;

struct Search<'p> {
    p: &'p Problem,
    memo: FxHashMap<State, Choice>,
}

struct OverBudget;

impl Search<'_> {
    fn best(&mut self, st: &State, total: usize) -> Result<Option<usize>, OverBudget> {
        let p = self.p;
        if st.i == p.candidates.len() {
            let done = st.exact == p.target_exact && total == p.target_total;
            return Ok(done.then_some(0));
        }
        if let Some(hit) = self.memo.get(st) {
            return Ok(hit.map(|(c, _)| c));
        }
        if self.memo.len() >= SEARCH_BUDGET {
            return Err(OverBudget);
        }
        let (more_exact, more_total) = p.reachable(st);
        if st.exact + more_exact < p.target_exact || total + more_total < p.target_total {
            self.memo.insert(st.clone(), None);
            return Ok(None);
        }

        let target_stem = p.target_total - p.target_exact;
        let mut best: Choice = None;

        let skip = State {
            i: st.i + 1,
            prev: None,
            exact: st.exact,
            used: st.used.clone(),
        };
        if let Some(c) = self.best(&skip, total)? {
            best = Some((c, None));
        }

        for &(j, is_exact) in &p.candidates[st.i] {
            if st.used.has(j) {
                continue;
            }
            let exact = st.exact + is_exact as usize;
            if exact > p.target_exact || (total + 1 - exact) > target_stem {
                continue;
            }
            let next = State {
                i: st.i + 1,
                prev: Some(j),
                exact,
                used: st.used.with(j),
            };
            let opens = match st.prev {
                Some(pj) if pj + 1 == j => 0,
                _ => 1,
            };
            if let Some(c) = self.best(&next, total + 1)? {
                if best.is_none_or(|(b, _)| c + opens < b) {
                    best = Some((c + opens, Some((j, is_exact))));
                }
            }
        }
        self.memo.insert(st.clone(), best);
        Ok(best.map(|(c, _)| c))
    }
}

fn exact_search(p: &Problem) -> Option<Alignment> {
    let mut search = Search {
        p,
        memo: FxHashMap::default(),
    };
    let mut st = State {
        i: 0,
        prev: None,
        exact: 0,
        used: Used::empty(p.words),
    };
    let chunks = search.best(&st, 0).ok()??;
    let mut pairs = Vec::new();
    let mut exact = 0;
    while st.i < p.candidates.len() {
        let (_, choice) = search.memo.get(&st).cloned().flatten()?;
        st = match choice {
            None => State {
                i: st.i + 1,
                prev: None,
                exact: st.exact,
                used: st.used,
            },
            Some((j, is_exact)) => {
                pairs.push((st.i, j));
                exact += is_exact as usize;
                State {
                    i: st.i + 1,
                    prev: Some(j),
                    exact: st.exact + is_exact as usize,
                    used: st.used.with(j),
                }
            }
        };
    }
    debug_assert_eq!(count_chunks(&pairs), chunks);
    Some(Alignment {
        pairs,
        exact,
        chunks,
        optimal: true,
    })
}

/// Stage-by-stage left-to-right aligner: each word takes the reference
/// position that extends the current chunk if possible, else the leftmost
/// free one. Match counts are still maximal; chunk count may not be.
fn greedy(p: &Problem) -> Alignment {
    let n = p.candidates.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; p.words];
    let mut exact = 0;
    for stage_exact in [true, false] {
        for i in 0..n {
            if assigned[i].is_some() {
                continue;
            }
            let free: Vec<usize> = p.candidates[i]
                .iter()
                .filter(|(j, e)| *e == stage_exact && !used[*j])
                .map(|(j, _)| *j)
                .collect();
            let prev = if i > 0 { assigned[i - 1] } else { None };
            let pick = prev
                .and_then(|pj| free.iter().copied().find(|j| *j == pj + 1))
                .or_else(|| free.first().copied());
            if let Some(j) = pick {
                assigned[i] = Some(j);
                used[j] = true;
                exact += stage_exact as usize;
            }
        }
    }
    let pairs: Vec<(usize, usize)> = assigned
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect();
    Alignment {
        chunks: count_chunks(&pairs),
        pairs,
        exact,
        optimal: false,
    }
}

pub fn align(hyp: &[String], reference: &[String], opts: MeteorOptions) -> Alignment {
    let p = Problem::new(hyp, reference, opts);
    if p.target_total == 0 {
        return Alignment {
            pairs: Vec::new(),
            exact: 0,
            chunks: 0,
            optimal: true,
        };
    }
    exact_search(&p).unwrap_or_else(|| {
        log::debug!("meteor alignment search over budget, using greedy alignment");
        greedy(&p)
    })
}
