use anyhow::{Context, Result};

use gradient_service::{router, serve, AppState, CorsConfig};

use crate::args::ServeArgs;
use crate::{backends, Ctx, Usage};

pub fn run(a: ServeArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.config;
    let graph = backends::graph(a.graph.as_deref(), cfg)?;
    let classifier = backends::classifier(&a.classifier, cfg)?;
    let generator = backends::generator(&a.generator, &a.classifier.remote, cfg, None)?;
    let state = AppState::new(graph, classifier, generator)
        .with_threshold(backends::threshold(&a.classifier, cfg)?)
        .with_max_length(backends::max_length(&a.generator, cfg));
    let origins = if a.cors_origins.is_empty() {
        cfg.cors_origins.clone()
    } else {
        a.cors_origins
    };
    let app = router(state, &CorsConfig { origins }).map_err(Usage::err)?;

    let host = a.host.or_else(|| cfg.host.clone()).unwrap_or_else(|| "127.0.0.1".into());
    let port = a.port.or(cfg.port).unwrap_or(8080);
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host.as_str(), port))
            .await
            .map_err(|e| Usage::err(format!("binding {host}:{port}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        serve(listener, app).await.context("serving")
    })
}
