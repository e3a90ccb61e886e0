//! The full analysis flow through the engine, then the same request through
//! the HTTP router (in-process, no socket).

use std::path::Path;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use hwv2w::service::{router, AppState, Engine, EngineConfig};
use tower::ServiceExt;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let config = EngineConfig {
        nvd_feeds: vec![fx.join("nvd/hw_feed.json")],
        cwe_catalog: Some(fx.join("cwe_catalog.csv")),
        ..EngineConfig::default()
    };
    let description = std::env::args().nth(1).unwrap_or_else(|| "electromagnetic side-channel".into());

    let cfg = config.clone();
    let engine = tokio::task::spawn_blocking(move || Engine::load(&cfg)).await??;
    let report = engine.analyze(&description, None)?;
    print!("{}", hwv2w::service::cli::render_report(&report));

    let state = AppState::new(config, Some(engine), None);
    let body = serde_json::json!({ "description": description, "k": 3 }).to_string();
    let req = Request::post("/api/analyze").header("content-type", "application/json").body(Body::from(body))?;
    let resp = router(state).oneshot(req).await?;
    let status = resp.status();
    let bytes = resp.into_body().collect().await?.to_bytes();
    let v: serde_json::Value = serde_json::from_slice(&bytes)?;
    println!("\nPOST /api/analyze -> {status}, {} matches, modal {}", v["matches"].as_array().map_or(0, Vec::len), v["cwe_distribution"]["modal"]);
    Ok(())
}
