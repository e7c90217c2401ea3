use anyhow::{Context, Result};

use gradient_core::corpus::read_jsonl;
use gradient_core::eval::{compare, evaluate, EvalCache, EvalOptions, EvalReport, ReferenceMode};

use crate::args::{EvaluateArgs, ReferenceArg};
use crate::{backends, Ctx, Usage};

pub fn run(a: EvaluateArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.config;
    let records = read_jsonl(&a.dataset)?;
    let graph = backends::graph(a.graph.as_deref(), cfg)?;
    let classifier = backends::classifier(&a.classifier, cfg)?;
    let generator = backends::generator(&a.generator, &a.classifier.remote, cfg, Some(&records))?;

    let mut opts = EvalOptions::new(
        a.model_name.clone(),
        a.dataset_name.parse().map_err(Usage::err)?,
    );
    opts.restricted = a.restricted;
    opts.reference = match a.reference {
        ReferenceArg::Target => ReferenceMode::Target,
        ReferenceArg::Input => ReferenceMode::Input,
    };
    opts.threshold = backends::threshold(&a.classifier, cfg)?;
    opts.max_length = backends::max_length(&a.generator, cfg);

    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut cache = if a.no_cache {
        None
    } else {
        let path = a.cache.clone().unwrap_or_else(|| a.out.join("cache.jsonl"));
        Some(EvalCache::open(&path)?)
    };

    let (run, _) = evaluate(
        &records,
        generator.as_ref(),
        classifier.as_ref(),
        &graph,
        &opts,
        cache.as_mut(),
    )
    .with_context(|| format!("evaluating {} on {}", a.model_name, a.dataset.display()))?;
    log::info!("{} pairs evaluated", run.pair_count);

    let mut runs = EvalReport::load_runs(&a.out)?;
    runs.push(run);
    let report = compare(runs);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.write_to(&a.out)?;
    print!("{}", report.to_text());
    Ok(())
}
