//! Corpus BLEU: clipped n-gram precision for n = 1..=4 aggregated over the
//! corpus, uniform weights, brevity penalty on total lengths.

use serde::Serialize;

use super::ngram::{clipped_overlap, ngram_total};
use super::{MetricError, TokenSeq};

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuOptions {
    /// Add one to numerator and denominator for orders 2 and up.
    pub add_one_smoothing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuBreakdown {
    pub score: f64,
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
}

pub fn bleu(corpus: &[(TokenSeq, TokenSeq)]) -> Result<f64, MetricError> {
    bleu_with(corpus, BleuOptions::default()).map(|b| b.score)
}

pub fn bleu_with(
    corpus: &[(TokenSeq, TokenSeq)],
    opts: BleuOptions,
) -> Result<BleuBreakdown, MetricError> {
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut matches = [0usize; MAX_ORDER];
    let mut totals = [0usize; MAX_ORDER];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (hyp, reference) in corpus {
        hyp_len += hyp.len();
        ref_len += reference.len();
        for n in 1..=MAX_ORDER {
            matches[n - 1] += clipped_overlap(hyp, reference, n);
            totals[n - 1] += ngram_total(hyp.len(), n);
        }
    }

    let mut precisions = [0.0; MAX_ORDER];
    for i in 0..MAX_ORDER {
        precisions[i] = if opts.add_one_smoothing && i > 0 {
            (matches[i] + 1) as f64 / (totals[i] + 1) as f64
        } else if totals[i] == 0 {
            0.0
        } else {
            matches[i] as f64 / totals[i] as f64
        };
    }

    let brevity_penalty = if hyp_len == 0 {
        0.0
    } else if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };

    let score = if precisions.contains(&0.0) {
        0.0
    } else {
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        brevity_penalty * log_mean.exp()
    };

    Ok(BleuBreakdown {
        score,
        matches,
        totals,
        precisions,
        brevity_penalty,
        hyp_len,
        ref_len,
    })
}
