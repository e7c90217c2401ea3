//! HTTP JSON facade over the classifier, generator and transition graph.
//!
//! Routes:
//! - `POST /api/classify` `{text}`
//! - `GET /api/graph` (also `/graph`)
//! - `POST /api/transitions` `{emotion}`
//! - `POST /api/paraphrase` `{text, source?, target}`
//!
//! Every error body is `{"code", "message"}`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::header::{CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use gradient_core::classifier::{dominant_emotion, Classifier, Threshold};
use gradient_core::gateway::GatewayError;
use gradient_core::generator::{GenerationRequest, Generator, DEFAULT_MAX_LENGTH};
use gradient_core::graph::{TransitionGraph, TransitionSuggestion};
use gradient_core::prefix::{self, TransitionPrefix};
use gradient_core::taxonomy::EmotionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    BackendUnavailable,
    NotFound,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::BackendUnavailable => StatusCode::SERVICE_UNAVAILABLE,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        let message = message.into();
        ApiError {
            code,
            message: if message.is_empty() {
                format!("{code:?}")
            } else {
                message
            },
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }
}

impl From<GatewayError> for ApiError {
    fn from(e: GatewayError) -> Self {
        let code = match e {
            GatewayError::InvalidRequest(_) => ErrorCode::BadRequest,
            GatewayError::Config(_) => ErrorCode::Internal,
            _ => ErrorCode::BackendUnavailable,
        };
        ApiError::new(code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

/// Shared, immutable server state.
#[derive(Clone)]
pub struct AppState {
    graph: Arc<TransitionGraph>,
    graph_json: Arc<str>,
    etag: HeaderValue,
    classifier: Arc<dyn Classifier>,
    generator: Arc<dyn Generator>,
    threshold: Threshold,
    max_length: usize,
}

impl AppState {
    pub fn new(
        graph: TransitionGraph,
        classifier: Arc<dyn Classifier>,
        generator: Arc<dyn Generator>,
    ) -> Self {
        let graph_json = graph.to_json();
        let digest = hex::encode(Sha256::digest(graph_json.as_bytes()));
        AppState {
            graph: Arc::new(graph),
            graph_json: graph_json.into(),
            etag: HeaderValue::from_str(&format!("\"{digest}\"")).expect("hex is a valid header"),
            classifier,
            generator,
            threshold: Threshold::default(),
            max_length: DEFAULT_MAX_LENGTH,
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_max_length(mut self, max_length: usize) -> Self {
        self.max_length = max_length;
        self
    }
}

/// Allowed browser origins. An empty list allows any origin.
#[derive(Debug, Clone, Default)]
pub struct CorsConfig {
    pub origins: Vec<String>,
}

impl CorsConfig {
    fn layer(&self) -> Result<CorsLayer, String> {
        let base = CorsLayer::new()
            .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
            .allow_headers([CONTENT_TYPE, IF_NONE_MATCH])
            .expose_headers([ETAG]);
        if self.origins.is_empty() || self.origins.iter().any(|o| o == "*") {
            return Ok(base.allow_origin(Any));
        }
        let origins = self
            .origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| format!("invalid CORS origin {o:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(base.allow_origin(AllowOrigin::list(origins)))
    }
}

pub fn router(state: AppState, cors: &CorsConfig) -> Result<Router, String> {
    Ok(Router::new()
        .route("/api/classify", post(classify))
        .route("/api/graph", get(graph))
        .route("/graph", get(graph))
        .route("/api/transitions", post(transitions))
        .route("/api/paraphrase", post(paraphrase))
        .fallback(|| async { ApiError::new(ErrorCode::NotFound, "no such route") })
        .layer(cors.layer()?)
        .with_state(state))
}

/// Serves `app` until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Parses a JSON body, reporting every failure as `bad_request`.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

/// Resolves a name or numeric id from a JSON value.
fn emotion_of(v: &Value) -> Option<Result<EmotionId, String>> {
    let parsed = match v {
        Value::Null => return None,
        Value::String(s) => s.parse::<EmotionId>().map_err(|e| e.to_string()),
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| format!("emotion id {n} is not an integer"))
            .and_then(|i| EmotionId::new(i).map_err(|e| e.to_string())),
        other => Err(format!("emotion must be a name or id, got {other}")),
    };
    Some(parsed)
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(ErrorCode::Internal, format!("worker failed: {e}")))?
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyRequest {
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub emotion: Option<EmotionId>,
    pub id: Option<u8>,
    pub score: Option<f64>,
    pub scores: Vec<f64>,
}

async fn classify(
    State(st): State<AppState>,
    body: Bytes,
) -> Result<Json<ClassifyResponse>, ApiError> {
    let req: ClassifyRequest = parse_body(&body)?;
    if req.text.trim().is_empty() {
        return Err(ApiError::bad_request("text must not be empty"));
    }
    let clf = st.classifier.clone();
    let scores = blocking(move || {
        let mut v = clf.classify_scores(&[req.text.as_str()])?;
        v.pop()
            .ok_or_else(|| ApiError::new(ErrorCode::BackendUnavailable, "classifier returned no scores"))
    })
    .await?;
    let label = dominant_emotion(&scores, st.threshold);
    Ok(Json(ClassifyResponse {
        emotion: label.emotion,
        id: label.emotion.map(EmotionId::value),
        score: label.score,
        scores: scores.as_slice().to_vec(),
    }))
}

async fn graph(State(st): State<AppState>, headers: HeaderMap) -> Response {
    if headers.get(IF_NONE_MATCH) == Some(&st.etag) {
        return (StatusCode::NOT_MODIFIED, [(ETAG, st.etag.clone())]).into_response();
    }
    (
        [
            (CONTENT_TYPE, HeaderValue::from_static("application/json")),
            (ETAG, st.etag.clone()),
        ],
        st.graph_json.to_string(),
    )
        .into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionsRequest {
    emotion: Value,
}

#[derive(Debug, Serialize)]
pub struct TransitionsResponse {
    pub suggestions: Vec<TransitionSuggestion>,
}

async fn transitions(
    State(st): State<AppState>,
    body: Bytes,
) -> Result<Json<TransitionsResponse>, ApiError> {
    let req: TransitionsRequest = parse_body(&body)?;
    let src = match emotion_of(&req.emotion) {
        None => return Err(ApiError::bad_request("emotion is required")),
        Some(Err(e)) => return Err(ApiError::new(ErrorCode::NotFound, e)),
        Some(Ok(id)) => id,
    };
    Ok(Json(TransitionsResponse {
        suggestions: st.graph.targets_of(src),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParaphraseRequest {
    text: String,
    #[serde(default)]
    source: Value,
    target: Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ParaphraseResponse {
    pub output: String,
    pub prefix: String,
    pub source: EmotionId,
    pub target: EmotionId,
    pub graph_valid: bool,
}

async fn paraphrase(
    State(st): State<AppState>,
    body: Bytes,
) -> Result<Json<ParaphraseResponse>, ApiError> {
    let req: ParaphraseRequest = parse_body(&body)?;
    if req.text.trim().is_empty() {
        return Err(ApiError::bad_request("text must not be empty"));
    }
    let target = match emotion_of(&req.target) {
        None => return Err(ApiError::bad_request("target is required")),
        Some(r) => r.map_err(|e| ApiError::bad_request(format!("target: {e}")))?,
    };
    let source = match emotion_of(&req.source) {
        None => None,
        Some(r) => Some(r.map_err(|e| ApiError::bad_request(format!("source: {e}")))?),
    };

    let (clf, generator, threshold, max_length) =
        (st.classifier.clone(), st.generator.clone(), st.threshold, st.max_length);
    let text = req.text;
    let (source, line, output) = blocking(move || {
        let source = match source {
            Some(s) => s,
            None => {
                let scores = clf.classify_labels(&[text.as_str()], threshold)?;
                scores.first().and_then(|l| l.emotion).ok_or_else(|| {
                    ApiError::bad_request(
                        "no dominant emotion found for the text; pass source explicitly",
                    )
                })?
            }
        };
        let line = prefix::encode(TransitionPrefix::by_id(source, target), &text)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let req = GenerationRequest::new(line.clone())?.with_max_length(max_length);
        let output = generator.generate(&req)?.output;
        Ok((source, line, output))
    })
    .await?;

    Ok(Json(ParaphraseResponse {
        output,
        prefix: line,
        source,
        target,
        graph_valid: st.graph.is_valid_transition(source, target),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes_map_to_statuses() {
        assert_eq!(ErrorCode::BadRequest.status(), 400);
        assert_eq!(ErrorCode::BackendUnavailable.status(), 503);
        assert_eq!(ErrorCode::NotFound.status(), 404);
        assert_eq!(ErrorCode::Internal.status(), 500);
        let e = ApiError::from(GatewayError::Timeout { attempts: 3 });
        assert_eq!(e.code, ErrorCode::BackendUnavailable);
        assert_eq!(
            serde_json::to_value(&e).unwrap()["code"],
            "backend_unavailable"
        );
    }

    #[test]
    fn emotion_values() {
        assert_eq!(emotion_of(&Value::from("anger")).unwrap().unwrap(), EmotionId::from_name("anger").unwrap());
        assert_eq!(emotion_of(&Value::from(3)).unwrap().unwrap().name(), "annoyance");
        assert!(emotion_of(&Value::from("angst")).unwrap().is_err());
        assert!(emotion_of(&Value::from(1.5)).unwrap().is_err());
        assert!(emotion_of(&Value::Null).is_none());
    }

    #[test]
    fn message_never_empty() {
        assert!(!ApiError::new(ErrorCode::Internal, "").message.is_empty());
    }
}
