//! ROUGE-N and ROUGE-L as per-pair F1, averaged over the corpus.

use super::ngram::{clipped_overlap, f1, ngram_total};
use super::{MetricError, TokenSeq};

pub fn rouge_n_pair(hyp: &[String], reference: &[String], n: usize) -> f64 {
    let (h, r) = (ngram_total(hyp.len(), n), ngram_total(reference.len(), n));
    if n == 0 || h == 0 || r == 0 {
        return 0.0;
    }
    let overlap = clipped_overlap(hyp, reference, n) as f64;
    f1(overlap / h as f64, overlap / r as f64)
}

pub fn rouge_n(corpus: &[(TokenSeq, TokenSeq)], n: usize) -> Result<f64, MetricError> {
    mean(corpus, |h, r| rouge_n_pair(h, r, n))
}

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

pub fn rouge_l_pair(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let lcs = lcs_len(hyp, reference) as f64;
    f1(lcs / hyp.len() as f64, lcs / reference.len() as f64)
}

pub fn rouge_l(corpus: &[(TokenSeq, TokenSeq)]) -> Result<f64, MetricError> {
    mean(corpus, rouge_l_pair)
}

pub(crate) fn mean<F>(corpus: &[(TokenSeq, TokenSeq)], per_pair: F) -> Result<f64, MetricError>
where
    F: Fn(&[String], &[String]) -> f64,
{
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let sum: f64 = corpus.iter().map(|(h, r)| per_pair(h, r)).sum();
    Ok(sum / corpus.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tokenize;

    fn t(s: &str) -> TokenSeq {
        tokenize(s)
    }

    #[test]
    fn rouge1_example() {
        let v = rouge_n_pair(&t("the cat"), &t("the cat sat"), 1);
        assert!((v - 0.8).abs() < 1e-15);
    }

    #[test]
    fn short_hypothesis_contributes_zero() {
        assert_eq!(rouge_n_pair(&t("cat"), &t("the cat sat"), 2), 0.0);
        assert_eq!(rouge_n_pair(&t("the cat sat"), &t("the cat sat"), 2), 1.0);
    }

    #[test]
    fn rouge_l_examples() {
        let v = rouge_l_pair(&t("the cat on mat"), &t("the cat sat on the mat"));
        assert!((v - 0.8).abs() < 1e-15);
        assert_eq!(lcs_len(&t("a b"), &t("b a")), 1);
        assert_eq!(rouge_l_pair(&t("a b c"), &t("a b c")), 1.0);
    }

    #[test]
    fn corpus_mean() {
        let c = vec![(t("a b"), t("a b")), (t("x"), t("y"))];
        assert_eq!(rouge_n(&c, 1).unwrap(), 0.5);
        assert_eq!(rouge_l(&[]), Err(MetricError::EmptyCorpus));
    }
}
