//! HTTP JSON-RPC 2.0 front for the fleet knowledge graph.
//!
//! One endpoint, `POST /rpc`, with methods `ask`, `add_engine`,
//! `add_update_method`, `update_values` and `get_fleet_state`.

mod config;
mod log;
pub mod rpc;
mod server;
mod speech;

pub use config::{ConfigError, ServerConfig, PORT_ENV};
pub use log::{LogEntry, RequestLog};
pub use server::{serve, shutdown_signal, ServeError, Service};
pub use speech::{Identity, SpeechAdapter};
