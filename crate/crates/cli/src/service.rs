//! HTTP query endpoint over a shared, immutable oracle.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::Serialize;

use crate::error::CliError;
use crate::index::{AnyOracle, QuerySpec};

pub struct AppState {
    pub oracle: AnyOracle,
    health: String,
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    graph_fingerprint: String,
    index_checksum: String,
    distance_kind: &'static str,
    n: u64,
    m: u64,
    alpha: f64,
    seed: u64,
}

impl AppState {
    pub fn new(oracle: AnyOracle) -> Self {
        let h = oracle.header();
        let health = Health {
            status: "ok",
            graph_fingerprint: format!("{:016x}", h.graph_fingerprint),
            index_checksum: h.checksum.iter().map(|b| format!("{b:02x}")).collect(),
            distance_kind: h.distance_kind.name(),
            n: h.n,
            m: h.m,
            alpha: h.alpha,
            seed: h.seed,
        };
        AppState {
            oracle,
            health: serde_json::to_string(&health).expect("plain struct"),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/distance", get(distance))
        .route("/path", get(path))
        .route("/healthz", get(healthz))
        .with_state(state)
}

fn json(status: StatusCode, body: String) -> Response {
    (status, [(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn bad_request(message: String) -> Response {
    #[derive(Serialize)]
    struct Body {
        error: &'static str,
        message: String,
    }
    json(
        StatusCode::BAD_REQUEST,
        serde_json::to_string(&Body {
            error: "bad_request",
            message,
        })
        .unwrap(),
    )
}

fn node_param(params: &HashMap<String, String>, key: &str) -> Result<u64, String> {
    let raw = params.get(key).ok_or_else(|| format!("missing parameter {key}"))?;
    raw.parse()
        .map_err(|_| format!("parameter {key}={raw:?} is not a node id"))
}

fn answer(state: &AppState, params: &HashMap<String, String>, want_path: bool) -> Response {
    let parsed = (|| {
        let s = node_param(params, "s")?;
        let t = node_param(params, "t")?;
        let fallback = match params.get("fallback").map(String::as_str) {
            None | Some("0") => false,
            Some("1") => true,
            Some(other) => return Err(format!("fallback={other:?} must be 0 or 1")),
        };
        Ok((s, t, fallback))
    })();
    let (s, t, fallback) = match parsed {
        Ok(v) => v,
        Err(message) => return bad_request(message),
    };
    let spec = QuerySpec {
        want_path,
        fallback: fallback.then(|| crate::commands::default_search(&state.oracle)),
    };
    match state.oracle.query(s, t, spec) {
        Ok(r) => json(StatusCode::OK, r.to_json()),
        Err(e @ CliError::UnknownNode(_)) => json(StatusCode::NOT_FOUND, e.to_json()),
        Err(e) => json(StatusCode::INTERNAL_SERVER_ERROR, e.to_json()),
    }
}

async fn distance(State(state): State<Arc<AppState>>, Query(params): Query<HashMap<String, String>>) -> Response {
    answer(&state, &params, false)
}

async fn path(State(state): State<Arc<AppState>>, Query(params): Query<HashMap<String, String>>) -> Response {
    answer(&state, &params, true)
}

async fn healthz(State(state): State<Arc<AppState>>) -> Response {
    json(StatusCode::OK, state.health.clone())
}

/// Serves until ctrl-c, then lets in-flight requests finish. `ready` gets
/// the bound address (useful with port 0).
pub async fn serve(state: Arc<AppState>, listen: SocketAddr, ready: impl FnOnce(SocketAddr)) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(listen).await.map_err(CliError::Serve)?;
    ready(listener.local_addr().map_err(CliError::Serve)?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(CliError::Serve)
}
