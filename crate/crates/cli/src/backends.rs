//! Backend selection from `SPEC` strings, config and environment.

use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};

use gradient_core::classifier::{Classifier, FixedClassifier, LexiconClassifier, RemoteClassifier, Threshold};
use gradient_core::corpus::{read_jsonl, PairRecord};
use gradient_core::gateway::RemoteOptions;
use gradient_core::generator::{
    EchoGenerator, Generator, RemoteGenerator, TargetOracleGenerator, DEFAULT_MAX_LENGTH,
};
use gradient_core::graph::TransitionGraph;

use crate::args::{ClassifierArgs, GeneratorArg, RemoteArgs};
use crate::config::FileConfig;
use crate::Usage;

pub const CLASSIFIER_URL_ENV: &str = "GRADIENT_CLASSIFIER_URL";
pub const GENERATOR_URL_ENV: &str = "GRADIENT_GENERATOR_URL";

fn remote_options(args: &RemoteArgs, cfg: &FileConfig) -> RemoteOptions {
    let mut o = RemoteOptions::default();
    if let Some(t) = args.timeout.or(cfg.timeout) {
        o.timeout = Duration::from_secs(t);
    }
    if let Some(b) = args.batch_size.or(cfg.batch_size) {
        o.batch_size = b.max(1);
    }
    o
}

fn remote_url(spec_url: Option<&str>, env: &str, cfg_url: Option<&String>) -> Result<String> {
    if let Some(u) = spec_url {
        return Ok(u.to_string());
    }
    if let Ok(u) = std::env::var(env) {
        if !u.trim().is_empty() {
            return Ok(u);
        }
    }
    cfg_url
        .cloned()
        .ok_or_else(|| Usage::err(format!("remote backend needs a URL: use remote:URL or set {env}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn threshold(args: &ClassifierArgs, cfg: &FileConfig) -> Result<Threshold> {
    match args.threshold.or(cfg.threshold) {
        None => Ok(Threshold::default()),
        Some(t) => Threshold::new(t).map_err(|e| Usage::err(e.to_string())),
    }
}

pub fn classifier(args: &ClassifierArgs, cfg: &FileConfig) -> Result<Arc<dyn Classifier>> {
    let spec = args
        .classifier
        .clone()
        .or_else(|| cfg.classifier.clone())
        .unwrap_or_else(|| "lexicon".into());
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec.as_str(), None),
    };
    Ok(match (kind, arg) {
        ("lexicon", None) => Arc::new(LexiconClassifier::default()),
        ("lexicon", Some(path)) => Arc::new(
            LexiconClassifier::from_json(&read(Path::new(path))?)
                .map_err(|e| anyhow!("lexicon {path}: {e}"))?,
        ),
        ("fixed", Some(path)) => Arc::new(
            FixedClassifier::from_json(&read(Path::new(path))?)
                .map_err(|e| anyhow!("fixed classifier table {path}: {e}"))?,
        ),
        ("remote", url) => {
            let url = remote_url(url, CLASSIFIER_URL_ENV, cfg.classifier_url.as_ref())?;
            Arc::new(
                RemoteClassifier::new(&url, remote_options(&args.remote, cfg))
                    .map_err(|e| Usage::err(e.to_string()))?,
            )
        }
        _ => {
            return Err(Usage::err(format!(
                "unknown classifier {spec:?} (expected lexicon, lexicon:FILE, fixed:FILE, remote or remote:URL)"
            )))
        }
    })
}

/// `dataset` backs a bare `oracle` spec.
pub fn generator(
    args: &GeneratorArg,
    remote: &RemoteArgs,
    cfg: &FileConfig,
    dataset: Option<&[PairRecord]>,
) -> Result<Arc<dyn Generator>> {
    let spec = args
        .generator
        .clone()
        .or_else(|| cfg.generator.clone())
        .unwrap_or_else(|| "echo".into());
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec.as_str(), None),
    };
    Ok(match (kind, arg) {
        ("echo", None) => Arc::new(EchoGenerator),
        ("oracle", Some(path)) => {
            let records = read_jsonl(Path::new(path))?;
            Arc::new(TargetOracleGenerator::from_records(&records))
        }
        ("oracle", None) => match dataset {
            Some(records) => Arc::new(TargetOracleGenerator::from_records(records)),
            None => return Err(Usage::err("oracle generator needs a record file: oracle:FILE")),
        },
        ("remote", url) => {
            let url = remote_url(url, GENERATOR_URL_ENV, cfg.generator_url.as_ref())?;
            Arc::new(
                RemoteGenerator::new(&url, remote_options(remote, cfg))
                    .map_err(|e| Usage::err(e.to_string()))?,
            )
        }
        _ => {
            return Err(Usage::err(format!(
                "unknown generator {spec:?} (expected echo, oracle, oracle:FILE, remote or remote:URL)"
            )))
        }
    })
}

pub fn max_length(args: &GeneratorArg, cfg: &FileConfig) -> usize {
    args.max_length.or(cfg.max_length).unwrap_or(DEFAULT_MAX_LENGTH)
}

pub fn graph(path: Option<&Path>, cfg: &FileConfig) -> Result<TransitionGraph> {
    match path.or(cfg.graph.as_deref()) {
        None => Ok(TransitionGraph::default()),
        Some(p) => TransitionGraph::load(&read(p)?).with_context(|| format!("loading graph {}", p.display())),
    }
}
