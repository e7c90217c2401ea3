use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use gradient_core::classifier::EmotionLabel;
use gradient_core::metrics::{self, MetricValue};
use gradient_core::taxonomy::EmotionId;

use super::print_json;
use crate::args::MetricsCommand;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredLine {
    id: String,
    hypothesis: String,
    #[serde(default)]
    reference: Option<String>,
    #[serde(default)]
    pred_emotion: Option<EmotionId>,
    #[serde(default)]
    target_emotion: Option<EmotionId>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RefLine {
    id: String,
    reference: String,
    #[serde(default)]
    target_emotion: Option<EmotionId>,
}

#[derive(Serialize)]
struct ScoreOutput {
    pairs: usize,
    metrics: Vec<MetricValue>,
}

fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .with_context(|| format!("{}:{}", path.display(), n + 1))?,
        );
    }
    Ok(out)
}

fn label(e: Option<EmotionId>) -> EmotionLabel {
    e.map(|id| EmotionLabel::of(id, 1.0)).unwrap_or_default()
}

pub fn run(cmd: MetricsCommand) -> Result<()> {
    let MetricsCommand::Score {
        pred,
        reference,
        emotions,
    } = cmd;
    let mut preds: Vec<PredLine> = read_lines(&pred)?;
    if let Some(ref_path) = reference {
        let refs: Vec<RefLine> = read_lines(&ref_path)?;
        let mut by_id: HashMap<String, RefLine> = HashMap::new();
        for r in refs {
            if by_id.contains_key(&r.id) {
                bail!("{}: duplicate id {}", ref_path.display(), r.id);
            }
            by_id.insert(r.id.clone(), r);
        }
        for p in &mut preds {
            let r = by_id
                .remove(&p.id)
                .ok_or_else(|| anyhow!("no reference for id {}", p.id))?;
            p.reference = Some(r.reference);
            if r.target_emotion.is_some() {
                p.target_emotion = r.target_emotion;
            }
        }
        if let Some(extra) = by_id.keys().next() {
            bail!("reference id {extra} has no prediction");
        }
    }
    if preds.is_empty() {
        bail!("{} has no records", pred.display());
    }

    let mut pairs = Vec::with_capacity(preds.len());
    for p in &preds {
        let r = p
            .reference
            .as_deref()
            .ok_or_else(|| anyhow!("record {} has no reference; pass --ref", p.id))?;
        pairs.push((p.hypothesis.as_str(), r));
    }
    let corpus = metrics::tokenize_pairs(&pairs);
    let values = if emotions {
        let pl: Vec<EmotionLabel> = preds.iter().map(|p| label(p.pred_emotion)).collect();
        let tl: Vec<EmotionLabel> = preds.iter().map(|p| label(p.target_emotion)).collect();
        metrics::score_all(&corpus, &pl, &tl)?
    } else {
        metrics::paraphrase_metrics(&corpus)?
    };
    print_json(&ScoreOutput {
        pairs: preds.len(),
        metrics: values,
    })
}
