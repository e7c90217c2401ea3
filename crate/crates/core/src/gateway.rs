//! HTTP plumbing shared by the remote classifier and generator backends.
//!
//! Batches are split into chunks, at most `max_in_flight` chunks are sent at
//! once, and results are reassembled in input order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("backend unreachable after {attempts} attempt(s): {message}")]
    Unreachable { attempts: u32, message: String },
    #[error("backend timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("malformed backend response: {0}")]
    Malformed(String),
    #[error("backend returned an empty output for item {0}")]
    EmptyOutput(usize),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("backend configuration: {0}")]
    Config(String),
}

impl GatewayError {
    /// Errors caused by the backend being down or slow, as opposed to bad data.
    pub fn is_unavailable(&self) -> bool {
        matches!(
            self,
            GatewayError::Unreachable { .. } | GatewayError::Timeout { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_millis(200),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based), doubling each time.
    pub fn backoff(&self, retry: u32) -> Duration {
        self.initial_backoff * 2u32.saturating_pow(retry.saturating_sub(1))
    }
}

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub retry: RetryPolicy,
    pub timeout: Duration,
    pub batch_size: usize,
    pub max_in_flight: usize,
}

impl Default for RemoteOptions {
    fn default() -> Self {
        RemoteOptions {
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(60),
            batch_size: 32,
            max_in_flight: 4,
        }
    }
}

/// A JSON-over-HTTP endpoint with retries.
#[derive(Debug, Clone)]
pub struct RemoteEndpoint {
    url: String,
    agent: ureq::Agent,
    options: RemoteOptions,
}

impl RemoteEndpoint {
    pub fn new(base: &str, path: &str, options: RemoteOptions) -> Result<Self, GatewayError> {
        let base = base.trim().trim_end_matches('/');
        if !(base.starts_with("http://") || base.starts_with("https://")) {
            return Err(GatewayError::Config(format!(
                "endpoint must be an http(s) URL, got {base:?}"
            )));
        }
        let agent = ureq::AgentBuilder::new().timeout(options.timeout).build();
        Ok(RemoteEndpoint {
            url: format!("{base}{path}"),
            agent,
            options,
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn options(&self) -> &RemoteOptions {
        &self.options
    }

    /// Sends one request, retrying transport failures and 5xx responses.
    pub fn post<B: Serialize, R: DeserializeOwned>(&self, body: &B) -> Result<R, GatewayError> {
        let policy = self.options.retry;
        let attempts = policy.attempts.max(1);
        let mut last = None;
        for attempt in 1..=attempts {
            if attempt > 1 {
                thread::sleep(policy.backoff(attempt - 1));
            }
            match self.agent.post(&self.url).send_json(body) {
                Ok(resp) => {
                    return resp
                        .into_json::<R>()
                        .map_err(|e| GatewayError::Malformed(e.to_string()));
                }
                Err(ureq::Error::Status(code, resp)) if code >= 500 => {
                    let text = resp.into_string().unwrap_or_default();
                    log::warn!("{} returned {code} (attempt {attempt}/{attempts})", self.url);
                    last = Some(GatewayError::Unreachable {
                        attempts,
                        message: format!("status {code}: {text}"),
                    });
                }
                Err(ureq::Error::Status(code, resp)) => {
                    let text = resp.into_string().unwrap_or_default();
                    return Err(GatewayError::InvalidRequest(format!("status {code}: {text}")));
                }
                Err(ureq::Error::Transport(t)) => {
                    log::warn!("{} transport error (attempt {attempt}/{attempts}): {t}", self.url);
                    let timed_out = t.kind() == ureq::ErrorKind::Io
                        && t.to_string().to_lowercase().contains("timed out");
                    last = Some(if timed_out {
                        GatewayError::Timeout { attempts }
                    } else {
                        GatewayError::Unreachable {
                            attempts,
                            message: t.to_string(),
                        }
                    });
                }
            }
        }
        Err(last.expect("at least one attempt was made"))
    }
}

/// Runs `call` over `items` in chunks of `batch_size`, with at most
/// `max_in_flight` chunks outstanding, and concatenates the results in input
/// order. Each chunk must return exactly as many results as it was given.
pub fn run_chunked<T, R, F>(
    items: &[T],
    batch_size: usize,
    max_in_flight: usize,
    call: F,
) -> Result<Vec<R>, GatewayError>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> Result<Vec<R>, GatewayError> + Sync,
{
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let chunks: Vec<&[T]> = items.chunks(batch_size.max(1)).collect();
    type Slot<R> = Mutex<Option<Result<Vec<R>, GatewayError>>>;
    let slots: Vec<Slot<R>> = chunks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = max_in_flight.clamp(1, chunks.len());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(chunk) = chunks.get(i) else { break };
                let result = call(chunk).and_then(|out| {
                    if out.len() == chunk.len() {
                        Ok(out)
                    } else {
                        Err(GatewayError::Malformed(format!(
                            "expected {} results, got {}",
                            chunk.len(),
                            out.len()
                        )))
                    }
                });
                let failed = result.is_err();
                *slots[i].lock().unwrap() = Some(result);
                if failed {
                    // Stop handing out new chunks.
                    next.store(chunks.len(), Ordering::SeqCst);
                }
            });
        }
    });
    let mut out = Vec::with_capacity(items.len());
    for slot in slots {
        match slot.into_inner().unwrap() {
            Some(Ok(v)) => out.extend(v),
            Some(Err(e)) => return Err(e),
            None => unreachable!("chunks are only skipped after an earlier failure"),
        }
    }
    Ok(out)
}
