//! Google BLEU: min of aggregate n-gram precision and recall over n = 1..=4.

use super::ngram::{clipped_overlap, ngram_total};
use super::{MetricError, TokenSeq};

const MAX_ORDER: usize = 4;

pub fn gleu(corpus: &[(TokenSeq, TokenSeq)]) -> Result<f64, MetricError> {
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let (mut matches, mut hyp_total, mut ref_total) = (0usize, 0usize, 0usize);
    for (hyp, reference) in corpus {
        for n in 1..=MAX_ORDER {
            matches += clipped_overlap(hyp, reference, n);
            hyp_total += ngram_total(hyp.len(), n);
            ref_total += ngram_total(reference.len(), n);
        }
    }
    if hyp_total == 0 || ref_total == 0 {
        return Ok(0.0);
    }
    let precision = matches as f64 / hyp_total as f64;
    let recall = matches as f64 / ref_total as f64;
    Ok(precision.min(recall))
}
