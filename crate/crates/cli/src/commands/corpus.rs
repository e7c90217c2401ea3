use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use gradient_core::corpus::{
    filter_pairs, ingest, label_pairs, merge, read_jsonl, restrict_to_graph, split_pairs, stats,
    swap_for_limited_data, FilterOptions, Format, Split, SplitPolicy,
};

use super::{print_json, report_summary, write_records};
use crate::args::{CorpusCommand, SplitKind};
use crate::{backends, Ctx, Usage};

pub fn run(cmd: CorpusCommand, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.config;
    match cmd {
        CorpusCommand::Ingest {
            format,
            input,
            split,
            out,
        } => {
            let format = Format::resolve(&format, &input).map_err(|e| Usage::err(e.to_string()))?;
            let split: Split = split.parse().map_err(Usage::err)?;
            let ing = ingest(&input, format, split)?;
            write_records(&ing.records, out.out.as_deref())?;
            report_summary(
                &json!({
                    "records": ing.records.len(),
                    "skipped_negative": ing.skipped_negative,
                    "skipped_malformed": ing.skipped_malformed,
                    "skipped_duplicate": ing.skipped_duplicate,
                }),
                out.out.is_none(),
            )
        }
        CorpusCommand::Label {
            input,
            backends: b,
            out,
        } => {
            let records = read_jsonl(&input.input)?;
            let clf = backends::classifier(&b, cfg)?;
            let threshold = backends::threshold(&b, cfg)?;
            let labeled = label_pairs(records, clf.as_ref(), threshold)?;
            let unlabeled = labeled
                .iter()
                .filter(|r| r.source_label().is_none() || r.target_label().is_none())
                .count();
            write_records(&labeled, out.out.as_deref())?;
            report_summary(
                &json!({
                    "records": labeled.len(),
                    "without_dominant_emotion": unlabeled,
                    "classifier": clf.name(),
                    "threshold": threshold.value(),
                }),
                out.out.is_none(),
            )
        }
        CorpusCommand::Filter {
            input,
            pwi_threshold,
            no_majority,
            out,
        } => {
            let pwi = pwi_threshold.or(cfg.pwi_threshold);
            if let Some(t) = pwi {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Usage::err(format!("--pwi-threshold must be in [0, 1], got {t}")));
                }
            }
            let opts = FilterOptions {
                pwi_threshold: pwi,
                require_majority: !no_majority,
            };
            let records = read_jsonl(&input.input)?;
            let (kept, st) = filter_pairs(records, &opts);
            write_records(&kept, out.out.as_deref())?;
            report_summary(&st, out.out.is_none())
        }
        CorpusCommand::Split {
            input,
            policy,
            ratio,
            swap,
            train_out,
            test_out,
        } => {
            let records = read_jsonl(&input.input)?;
            let policy = match policy {
                SplitKind::Presplit => SplitPolicy::Presplit,
                SplitKind::Random => SplitPolicy::Random {
                    ratio,
                    seed: ctx.seed,
                },
            };
            let (mut train, mut test) = split_pairs(records, policy).map_err(|e| match e {
                gradient_core::corpus::CorpusError::BadRatio(_) => Usage::err(e.to_string()),
                other => other.into(),
            })?;
            if swap {
                (train, test) = swap_for_limited_data(train, test);
            }
            write_records(&train, Some(&train_out))?;
            write_records(&test, Some(&test_out))?;
            print_json(&json!({
                "train": train.len(),
                "test": test.len(),
                "seed": ctx.seed,
                "swapped": swap,
            }))
        }
        CorpusCommand::Restrict { input, graph, out } => {
            let g = backends::graph(graph.as_deref(), cfg)?;
            let records = read_jsonl(&input.input)?;
            let n = records.len();
            let (kept, fraction) = restrict_to_graph(records, &g);
            write_records(&kept, out.out.as_deref())?;
            report_summary(
                &json!({"input": n, "kept": kept.len(), "fraction": fraction}),
                out.out.is_none(),
            )
        }
        CorpusCommand::Stats { input, graph } => {
            let g = backends::graph(graph.as_deref(), cfg)?;
            let records = read_jsonl(&input.input)?;
            print_json(&stats(&records, &g))
        }
        CorpusCommand::Merge { input, out } => {
            let sets = input
                .iter()
                .map(|p| read_jsonl(p).with_context(|| format!("reading {}", display(p))))
                .collect::<Result<Vec<_>>>()?;
            let (merged, dupes) = merge(sets);
            write_records(&merged, out.out.as_deref())?;
            report_summary(
                &json!({"records": merged.len(), "duplicates_dropped": dupes}),
                out.out.is_none(),
            )
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
