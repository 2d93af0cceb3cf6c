use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::State as AxumState;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use jarvis_core::fleet::{EngineRecord, MethodSpec, SystemResponse};
use jarvis_core::{Highlight, Jarvis, UpdateRequest};
use parking_lot::RwLock;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::log::RequestLog;
use crate::rpc::{self, RpcError};
use crate::speech::{Identity, SpeechAdapter};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct State {
    jarvis: Jarvis,
    /// Target of the last answered `ask`, shared by every client.
    highlight: Option<Highlight>,
}

struct Shared {
    state: RwLock<State>,
    log: RequestLog,
    speech: Box<dyn SpeechAdapter>,
}

/// The RPC methods over shared state. Cheap to clone.
#[derive(Clone)]
pub struct Service {
    shared: Arc<Shared>,
}

#[derive(Deserialize)]
struct AskParams {
    text: String,
}

#[derive(Deserialize)]
struct AddEngineParams {
    engine: EngineRecord,
}

fn to_json<T: Serialize>(v: &T) -> Result<Value, RpcError> {
    serde_json::to_value(v).map_err(|e| RpcError::new(rpc::INTERNAL_ERROR, e.to_string()))
}

fn params<T: DeserializeOwned>(v: Value) -> Result<T, RpcError> {
    serde_json::from_value(v).map_err(RpcError::invalid_params)
}

impl Service {
    pub fn new(jarvis: Jarvis, log: RequestLog, speech: Box<dyn SpeechAdapter>) -> Self {
        let state = RwLock::new(State { jarvis, highlight: None });
        Service { shared: Arc::new(Shared { state, log, speech }) }
    }

    /// In-memory service with the identity speech adapter and no log.
    pub fn plain(jarvis: Jarvis) -> Self {
        Service::new(jarvis, RequestLog::disabled(), Box::new(Identity))
    }

    pub fn ask(&self, text: &str) -> SystemResponse {
        let text = self.shared.speech.transcribe(text);
        let mut response = self.shared.state.read().jarvis.ask(&text);
        self.shared.state.write().highlight = Highlight::from_response(&response);
        response.message = self.shared.speech.synthesize(&response.message);
        response
    }

    /// Runs one method and returns its result document.
    pub fn call(&self, method: &str, params_value: Value) -> Result<Value, RpcError> {
        let started = Instant::now();
        let out = self.dispatch(method, params_value);
        self.shared.log.record(method, started.elapsed());
        out
    }

    fn dispatch(&self, method: &str, p: Value) -> Result<Value, RpcError> {
        match method {
            "ask" => {
                let AskParams { text } = params(p)?;
                to_json(&self.ask(&text))
            }
            "add_engine" => {
                let AddEngineParams { engine } = params(p)?;
                let id = engine.vr_id;
                self.shared.state.write().jarvis.add_engine(engine)?;
                Ok(json!({ "vr_id": id }))
            }
            "add_update_method" => {
                let spec: MethodSpec = params(p)?;
                let method = self.shared.state.write().jarvis.add_update_method(&spec)?;
                Ok(json!({ "characteristic": method.target, "func_args": method.func_args }))
            }
            "update_values" => {
                let req: UpdateRequest = params(p)?;
                let changed = self.shared.state.write().jarvis.update_values(&req)?;
                Ok(json!({ "changed": changed }))
            }
            "get_fleet_state" => {
                let state = self.shared.state.read();
                to_json(&state.jarvis.snapshot(state.highlight.clone()))
            }
            other => Err(RpcError::method_not_found(other)),
        }
    }

    /// Answers one request object; `None` for notifications.
    fn handle_one(&self, v: Value) -> Option<Value> {
        match rpc::parse_request(v) {
            Err((id, e)) => Some(rpc::failure(id, e)),
            Ok(req) => {
                let result = self.call(&req.method, req.params);
                let id = req.id?;
                Some(match result {
                    Ok(r) => rpc::success(id, r),
                    Err(e) => rpc::failure(id, e),
                })
            }
        }
    }

    /// Answers a raw request body: single call, batch, or garbage. `None`
    /// means nothing to send back.
    pub fn handle_body(&self, body: &[u8]) -> Option<Value> {
        let v: Value = match serde_json::from_slice(body) {
            Ok(v) => v,
            Err(e) => return Some(rpc::failure(Value::Null, RpcError::parse_error(e))),
        };
        match v {
            Value::Array(items) if items.is_empty() => {
                Some(rpc::failure(Value::Null, RpcError::invalid_request("empty batch")))
            }
            Value::Array(items) => {
                let out: Vec<Value> = items.into_iter().filter_map(|item| self.handle_one(item)).collect();
                (!out.is_empty()).then_some(Value::Array(out))
            }
            single => self.handle_one(single),
        }
    }

    pub fn router(&self) -> Router {
        Router::new().route("/rpc", post(rpc_endpoint)).with_state(self.clone())
    }

    pub fn flush_log(&self) -> io::Result<()> {
        self.shared.log.flush()
    }
}

async fn rpc_endpoint(AxumState(service): AxumState<Service>, body: Bytes) -> Response {
    let answer = tokio::task::spawn_blocking(move || service.handle_body(&body)).await;
    match answer {
        Ok(Some(v)) => ([(header::CONTENT_TYPE, "application/json")], v.to_string()).into_response(),
        Ok(None) => StatusCode::NO_CONTENT.into_response(),
        Err(_) => {
            let e = RpcError::new(rpc::INTERNAL_ERROR, "Internal error");
            ([(header::CONTENT_TYPE, "application/json")], rpc::failure(Value::Null, e).to_string()).into_response()
        }
    }
}

/// Serves until `shutdown` resolves, then flushes the request log.
pub async fn serve(
    listener: tokio::net::TcpListener,
    service: Service,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    axum::serve(listener, service.router()).with_graceful_shutdown(shutdown).await?;
    service.flush_log()?;
    Ok(())
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
