use serde::Serialize;

use super::PairRecord;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FilterOptions {
    /// Minimum PWI score, applied to records that carry one.
    pub pwi_threshold: Option<f64>,
    /// Drop records whose rater votes lack a strict majority.
    pub require_majority: bool,
}

/// Why a record was dropped. Rules are checked in declaration order and the
/// first one that fires is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    RaterMinority,
    Pwi,
    BlankEmotion,
    NeutralNeutral,
    MatchingEmotion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FilterStats {
    pub input_count: usize,
    pub kept_count: usize,
    pub dropped_rater_minority: usize,
    pub dropped_pwi: usize,
    pub dropped_blank_emotion: usize,
    pub dropped_neutral_neutral: usize,
    pub dropped_matching_emotion: usize,
}

impl FilterStats {
    pub fn dropped_total(&self) -> usize {
        self.dropped_rater_minority
            + self.dropped_pwi
            + self.dropped_blank_emotion
            + self.dropped_neutral_neutral
            + self.dropped_matching_emotion
    }

    /// `input = kept + all drops`.
    pub fn is_conserved(&self) -> bool {
        self.input_count == self.kept_count + self.dropped_total()
    }

    fn count(&mut self, reason: DropReason) {
        match reason {
            DropReason::RaterMinority => self.dropped_rater_minority += 1,
            DropReason::Pwi => self.dropped_pwi += 1,
            DropReason::BlankEmotion => self.dropped_blank_emotion += 1,
            DropReason::NeutralNeutral => self.dropped_neutral_neutral += 1,
            DropReason::MatchingEmotion => self.dropped_matching_emotion += 1,
        }
    }
}

pub fn drop_reason(r: &PairRecord, opts: &FilterOptions) -> Option<DropReason> {
    if opts.require_majority && r.rater_votes.is_some_and(|v| !v.is_majority()) {
        return Some(DropReason::RaterMinority);
    }
    if let (Some(min), Some(pwi)) = (opts.pwi_threshold, r.pwi) {
        if pwi < min {
            return Some(DropReason::Pwi);
        }
    }
    let (Some(src), Some(tgt)) = (r.source_label(), r.target_label()) else {
        return Some(DropReason::BlankEmotion);
    };
    if src.is_neutral() && tgt.is_neutral() {
        return Some(DropReason::NeutralNeutral);
    }
    if src == tgt {
        return Some(DropReason::MatchingEmotion);
    }
    None
}

pub fn filter_pairs(
    records: Vec<PairRecord>,
    opts: &FilterOptions,
) -> (Vec<PairRecord>, FilterStats) {
    let mut stats = FilterStats {
        input_count: records.len(),
        ..FilterStats::default()
    };
    let kept: Vec<PairRecord> = records
        .into_iter()
        .filter(|r| match drop_reason(r, opts) {
            Some(reason) => {
                stats.count(reason);
                false
            }
            None => true,
        })
        .collect();
    stats.kept_count = kept.len();
    (kept, stats)
}
