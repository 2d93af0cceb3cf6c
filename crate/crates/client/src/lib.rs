//! Typed calls against a running server's `/rpc` endpoint.

use std::sync::atomic::{AtomicU64, Ordering};

use jarvis_core::fleet::{EngineRecord, MethodSpec, SystemResponse, Values};
use jarvis_core::{FleetSnapshot, UpdateRequest};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("http: {0}")]
    Http(#[from] reqwest::Error),
    #[error("server error {code}: {message}")]
    Rpc { code: i64, message: String, data: Option<Value> },
    #[error("unexpected reply: {0}")]
    Protocol(String),
}

#[derive(Deserialize)]
struct Reply {
    #[serde(default)]
    result: Option<Value>,
    #[serde(default)]
    error: Option<ErrorBody>,
    id: Value,
}

#[derive(Deserialize)]
struct ErrorBody {
    code: i64,
    message: String,
    #[serde(default)]
    data: Option<Value>,
}

/// Result of `add_update_method`: the target and arguments after alias resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegisteredMethod {
    pub characteristic: String,
    pub func_args: Vec<String>,
}

#[derive(Debug)]
pub struct JarvisClient {
    url: String,
    http: reqwest::Client,
    next_id: AtomicU64,
}

impl JarvisClient {
    /// `url` is the full endpoint, e.g. `http://127.0.0.1:8080/rpc`.
    pub fn new(url: impl Into<String>) -> Self {
        JarvisClient { url: url.into(), http: reqwest::Client::new(), next_id: AtomicU64::new(1) }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub async fn call<T: DeserializeOwned>(&self, method: &str, params: Value) -> Result<T, ClientError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let body = json!({"jsonrpc": "2.0", "method": method, "params": params, "id": id});
        let reply: Reply = self.http.post(&self.url).json(&body).send().await?.error_for_status()?.json().await?;
        if reply.id != json!(id) {
            return Err(ClientError::Protocol(format!("reply id {} for request {id}", reply.id)));
        }
        match (reply.result, reply.error) {
            (_, Some(e)) => Err(ClientError::Rpc { code: e.code, message: e.message, data: e.data }),
            (Some(r), None) => serde_json::from_value(r).map_err(|e| ClientError::Protocol(e.to_string())),
            (None, None) => Err(ClientError::Protocol("neither result nor error".into())),
        }
    }

    pub async fn ask(&self, text: &str) -> Result<SystemResponse, ClientError> {
        self.call("ask", json!({ "text": text })).await
    }

    pub async fn add_engine(&self, engine: &EngineRecord) -> Result<i64, ClientError> {
        let v: Value = self.call("add_engine", json!({ "engine": engine })).await?;
        v["vr_id"].as_i64().ok_or_else(|| ClientError::Protocol(v.to_string()))
    }

    pub async fn add_update_method(&self, spec: &MethodSpec) -> Result<RegisteredMethod, ClientError> {
        self.call("add_update_method", serde_json::to_value(spec).map_err(|e| ClientError::Protocol(e.to_string()))?)
            .await
    }

    pub async fn update_values(&self, req: &UpdateRequest) -> Result<Values, ClientError> {
        #[derive(Deserialize)]
        struct Changed {
            changed: Values,
        }
        let params = serde_json::to_value(req).map_err(|e| ClientError::Protocol(e.to_string()))?;
        Ok(self.call::<Changed>("update_values", params).await?.changed)
    }

    pub async fn get_fleet_state(&self) -> Result<FleetSnapshot, ClientError> {
        self.call("get_fleet_state", json!({})).await
    }
}
