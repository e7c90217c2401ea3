mod corpus;
mod evaluate;
mod graph;
mod metrics;
mod serve;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use gradient_core::corpus::{write_jsonl, PairRecord};
use gradient_core::generator::GenerationRequest;
use gradient_core::prefix::{self, TransitionPrefix};
use gradient_core::taxonomy::EmotionId;

use crate::args::{Command, ParaphraseArgs};
use crate::{backends, Ctx, Usage};

pub fn run(command: Command, ctx: &Ctx) -> Result<()> {
    match command {
        Command::Corpus(c) => corpus::run(c, ctx),
        Command::Graph(c) => graph::run(c, ctx),
        Command::Paraphrase(a) => paraphrase(a, ctx),
        Command::Metrics(c) => metrics::run(c),
        Command::Evaluate(a) => evaluate::run(a, ctx),
        Command::Serve(a) => serve::run(a, ctx),
    }
}

pub(crate) fn parse_emotion(s: &str) -> Result<EmotionId> {
    s.parse::<EmotionId>().map_err(|e| Usage::err(e.to_string()))
}

/// Pretty JSON plus a trailing newline on standard output.
pub(crate) fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes records to `out`, or standard output when absent.
pub(crate) fn write_records(records: &[PairRecord], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            write_jsonl(records, &mut w)
                .and_then(|_| w.flush())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_jsonl(records, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// A run summary goes to standard output when records went to a file, and
/// to standard error when records occupy standard output.
pub(crate) fn report_summary<T: Serialize>(summary: &T, records_on_stdout: bool) -> Result<()> {
    if records_on_stdout {
        eprintln!("{}", serde_json::to_string(summary)?);
        Ok(())
    } else {
        print_json(summary)
    }
}

#[derive(Serialize)]
struct ParaphraseOutput {
    output: String,
    prefix: String,
    source: EmotionId,
    target: EmotionId,
    graph_valid: bool,
}

fn paraphrase(a: ParaphraseArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.config;
    if a.text.trim().is_empty() {
        return Err(Usage::err("--text must not be empty"));
    }
    let target = parse_emotion(&a.target)?;
    let graph = backends::graph(a.graph.as_deref(), cfg)?;
    let generator = backends::generator(&a.generator, &a.classifier.remote, cfg, None)?;
    let source = match &a.source {
        Some(s) => parse_emotion(s)?,
        None => {
            let clf = backends::classifier(&a.classifier, cfg)?;
            let threshold = backends::threshold(&a.classifier, cfg)?;
            let label = clf
                .classify_labels(&[a.text.as_str()], threshold)
                .context("classifying the source text")?;
            label
                .first()
                .and_then(|l| l.emotion)
                .context("no dominant emotion found for the text; pass --source")?
        }
    };
    let line = prefix::encode(TransitionPrefix::by_id(source, target), &a.text)?;
    let req = GenerationRequest::new(line.clone())?.with_max_length(backends::max_length(&a.generator, cfg));
    let result = generator.generate(&req).context("generating")?;
    if !graph.is_valid_transition(source, target) {
        log::warn!("{source} -> {target} is not an edge of the transition graph");
    }
    print_json(&ParaphraseOutput {
        output: result.output,
        prefix: line,
        source,
        target,
        graph_valid: graph.is_valid_transition(source, target),
    })
}
