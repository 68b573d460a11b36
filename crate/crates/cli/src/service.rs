//! HTTP front end for the opinion-spread simulation.
//!
//! `/simulation/simulate?ticks=N&bias=B[&seed=S]` runs one simulation and
//! answers with a [`SimulationReport`]. The request method is ignored.

use std::net::SocketAddr;

use agentloop::scenarios::OpinionConfig;
use axum::extract::RawQuery;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::any;
use axum::Router;
use serde_json::json;

use crate::runner::run_opinion;

pub const SIMULATE_PATH: &str = "/simulation/simulate";

/// Upper bound on `ticks` per request.
pub const MAX_TICKS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateParams {
    pub ticks: u64,
    pub bias: f64,
    pub seed: u64,
}

/// Parses the query string. Unknown parameters are ignored.
pub fn parse_params(query: &str) -> Result<SimulateParams, String> {
    let mut ticks = None;
    let mut bias = 0.0;
    let mut seed = 0;
    for (key, value) in form_urlencoded::parse(query.as_bytes()) {
        match key.as_ref() {
            "ticks" => {
                let n: u64 = value
                    .parse()
                    .map_err(|_| format!("ticks must be a non-negative integer, got `{value}`"))?;
                if n > MAX_TICKS {
                    return Err(format!("ticks must not exceed {MAX_TICKS}"));
                }
                ticks = Some(n);
            }
            "bias" => {
                bias = value
                    .parse::<f64>()
                    .ok()
                    .filter(|b| b.is_finite() && *b >= 0.0)
                    .ok_or_else(|| format!("bias must be a non-negative number, got `{value}`"))?;
            }
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| format!("seed must be an unsigned 64-bit integer, got `{value}`"))?;
            }
            _ => {}
        }
    }
    Ok(SimulateParams {
        ticks: ticks.ok_or("missing required parameter `ticks`")?,
        bias,
        seed,
    })
}

/// Status code and canonical JSON body for one request.
pub fn handle_simulate(query: &str) -> (StatusCode, String) {
    let params = match parse_params(query) {
        Ok(p) => p,
        Err(message) => return (StatusCode::BAD_REQUEST, json!({ "error": message }).to_string()),
    };
    let cfg = OpinionConfig {
        ticks: params.ticks,
        bias: params.bias,
        seed: params.seed,
        ..Default::default()
    };
    match run_opinion(&cfg) {
        Ok((report, _)) => (StatusCode::OK, report.to_json()),
        Err(e) => {
            tracing::error!(error = %e, ?params, "simulation failed");
            (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({ "error": "internal error" }).to_string(),
            )
        }
    }
}

async fn simulate(RawQuery(query): RawQuery) -> Response {
    let query = query.unwrap_or_default();
    let (status, body) = match tokio::task::spawn_blocking(move || handle_simulate(&query)).await {
        Ok(result) => result,
        Err(e) => {
            tracing::error!(error = %e, "simulation task panicked");
            (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({ "error": "internal error" }).to_string(),
            )
        }
    };
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

pub fn router() -> Router {
    Router::new().route(SIMULATE_PATH, any(simulate))
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}{SIMULATE_PATH}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
