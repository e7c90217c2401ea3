//! Paraphrase generation behind the prefix protocol.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::PairRecord;
use crate::gateway::{run_chunked, GatewayError, RemoteEndpoint, RemoteOptions};
use crate::prefix::{self, TransitionPrefix};

pub const DEFAULT_MAX_LENGTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRequest {
    input: String,
    pub max_length: usize,
}

impl GenerationRequest {
    /// `input` must be a well-formed prefix line.
    pub fn new(input: impl Into<String>) -> Result<Self, GatewayError> {
        let input = input.into();
        prefix::decode(&input).map_err(|e| GatewayError::InvalidRequest(e.to_string()))?;
        Ok(GenerationRequest {
            input,
            max_length: DEFAULT_MAX_LENGTH,
        })
    }

    pub fn with_max_length(mut self, max_length: usize) -> Self {
        self.max_length = max_length;
        self
    }

    pub fn input(&self) -> &str {
        &self.input
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationResult {
    pub output: String,
    pub backend: String,
    pub latency_ms: u64,
}

pub trait Generator: Send + Sync {
    fn name(&self) -> &str;

    /// One output per input line, in input order.
    fn generate_batch(
        &self,
        inputs: &[&str],
        max_length: usize,
    ) -> Result<Vec<GenerationResult>, GatewayError>;

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GatewayError> {
        let mut out = self.generate_batch(&[req.input()], req.max_length)?;
        out.pop()
            .ok_or_else(|| GatewayError::Malformed("backend returned no output".into()))
    }
}

fn body_of(line: &str) -> Result<&str, GatewayError> {
    prefix::decode(line)
        .map(|(_, body)| body)
        .map_err(|e| GatewayError::InvalidRequest(e.to_string()))
}

fn finish(
    backend: &str,
    started: Instant,
    outputs: Vec<String>,
) -> Result<Vec<GenerationResult>, GatewayError> {
    let latency_ms = started.elapsed().as_millis() as u64;
    outputs
        .into_iter()
        .enumerate()
        .map(|(i, output)| {
            if output.trim().is_empty() {
                Err(GatewayError::EmptyOutput(i))
            } else {
                Ok(GenerationResult {
                    output,
                    backend: backend.to_string(),
                    latency_ms,
                })
            }
        })
        .collect()
}

/// Returns the body of each input line unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoGenerator;

impl Generator for EchoGenerator {
    fn name(&self) -> &str {
        "echo"
    }

    fn generate_batch(
        &self,
        inputs: &[&str],
        _max_length: usize,
    ) -> Result<Vec<GenerationResult>, GatewayError> {
        let started = Instant::now();
        let outputs = inputs
            .iter()
            .map(|l| body_of(l).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        finish(self.name(), started, outputs)
    }
}

/// Test backend that answers each request with the reference target text.
///
/// Lookups try the full input line first, then the bare body, so a table
/// built from pair records resolves duplicate sources by their prefix.
#[derive(Debug, Clone, Default)]
pub struct TargetOracleGenerator {
    by_line: HashMap<String, String>,
    by_body: HashMap<String, String>,
}

impl TargetOracleGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_pair(mut self, source: &str, target: &str) -> Self {
        self.by_body.insert(source.to_string(), target.to_string());
        self
    }

    /// Indexes labeled records under their by-id prefix line.
    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = &'a PairRecord>,
    {
        let mut g = Self::new();
        for r in records {
            if let (Some(s), Some(t)) = (r.source_label(), r.target_label()) {
                if let Ok(line) = prefix::encode(TransitionPrefix::by_id(s, t), &r.source) {
                    g.by_line.insert(line, r.target.clone());
                }
            }
            g.by_body.entry(r.source.clone()).or_insert_with(|| r.target.clone());
        }
        g
    }

    pub fn len(&self) -> usize {
        self.by_body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_body.is_empty()
    }
}

impl Generator for TargetOracleGenerator {
    fn name(&self) -> &str {
        "oracle"
    }

    fn generate_batch(
        &self,
        inputs: &[&str],
        _max_length: usize,
    ) -> Result<Vec<GenerationResult>, GatewayError> {
        let started = Instant::now();
        let outputs = inputs
            .iter()
            .map(|line| {
                if let Some(t) = self.by_line.get(*line) {
                    return Ok(t.clone());
                }
                let body = body_of(line)?;
                self.by_body.get(body).cloned().ok_or_else(|| {
                    GatewayError::InvalidRequest(format!("oracle has no target for {body:?}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        finish(self.name(), started, outputs)
    }
}

#[derive(Serialize)]
struct GenerateRequestBody<'a> {
    inputs: &'a [&'a str],
    max_length: usize,
}

#[derive(Deserialize)]
struct GenerateResponseBody {
    outputs: Vec<String>,
}

/// `POST {endpoint}/generate` with `{"inputs": [...], "max_length": n}`,
/// answered by `{"outputs": [...]}`.
#[derive(Debug, Clone)]
pub struct RemoteGenerator {
    endpoint: RemoteEndpoint,
}

impl RemoteGenerator {
    pub fn new(base_url: &str, options: RemoteOptions) -> Result<Self, GatewayError> {
        Ok(RemoteGenerator {
            endpoint: RemoteEndpoint::new(base_url, "/generate", options)?,
        })
    }
}

impl Generator for RemoteGenerator {
    fn name(&self) -> &str {
        "remote"
    }

    fn generate_batch(
        &self,
        inputs: &[&str],
        max_length: usize,
    ) -> Result<Vec<GenerationResult>, GatewayError> {
        for line in inputs {
            body_of(line)?;
        }
        let opts = self.endpoint.options();
        run_chunked(inputs, opts.batch_size, opts.max_in_flight, |chunk| {
            let started = Instant::now();
            let resp: GenerateResponseBody = self.endpoint.post(&GenerateRequestBody {
                inputs: chunk,
                max_length,
            })?;
            if resp.outputs.len() != chunk.len() {
                return Err(GatewayError::Malformed(format!(
                    "expected {} outputs, got {}",
                    chunk.len(),
                    resp.outputs.len()
                )));
            }
            finish(self.name(), started, resp.outputs)
        })
    }
}
