//! JSON-RPC 2.0 envelopes and error codes.

use jarvis_core::fleet::FleetError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;
pub const INTERNAL_ERROR: i64 = -32603;

/// Application error codes, one per fleet error kind.
pub const UNKNOWN_ENGINE: i64 = -32001;
pub const UNKNOWN_SUBSYSTEM: i64 = -32002;
pub const UNKNOWN_CHARACTERISTIC: i64 = -32003;
pub const DUPLICATE_ENGINE_ID: i64 = -32004;
pub const SCHEMA_ERROR: i64 = -32005;
pub const EXPR_SYNTAX_ERROR: i64 = -32006;
pub const DEPENDENCY_CYCLE: i64 = -32007;
pub const EVAL_ERROR: i64 = -32008;
pub const HISTORY_ORDER: i64 = -32009;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpcError {
    pub code: i64,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl RpcError {
    pub fn new(code: i64, message: impl Into<String>) -> Self {
        RpcError { code, message: message.into(), data: None }
    }

    pub fn parse_error(detail: impl ToString) -> Self {
        RpcError { data: Some(Value::String(detail.to_string())), ..RpcError::new(PARSE_ERROR, "Parse error") }
    }

    pub fn invalid_request(detail: &str) -> Self {
        RpcError { data: Some(Value::String(detail.into())), ..RpcError::new(INVALID_REQUEST, "Invalid Request") }
    }

    pub fn method_not_found(method: &str) -> Self {
        RpcError { data: Some(Value::String(method.into())), ..RpcError::new(METHOD_NOT_FOUND, "Method not found") }
    }

    pub fn invalid_params(detail: impl ToString) -> Self {
        RpcError { data: Some(Value::String(detail.to_string())), ..RpcError::new(INVALID_PARAMS, "Invalid params") }
    }
}

pub fn fleet_error_code(e: &FleetError) -> i64 {
    match e {
        FleetError::UnknownEngine(_) => UNKNOWN_ENGINE,
        FleetError::UnknownSubsystem(_) => UNKNOWN_SUBSYSTEM,
        FleetError::UnknownCharacteristic(_) => UNKNOWN_CHARACTERISTIC,
        FleetError::DuplicateEngineId(_) => DUPLICATE_ENGINE_ID,
        FleetError::Schema(_) => SCHEMA_ERROR,
        FleetError::Expr(_) => EXPR_SYNTAX_ERROR,
        FleetError::DependencyCycle(_) => DEPENDENCY_CYCLE,
        FleetError::Eval { .. } => EVAL_ERROR,
        FleetError::HistoryOrder { .. } => HISTORY_ORDER,
    }
}

impl From<FleetError> for RpcError {
    fn from(e: FleetError) -> Self {
        RpcError { code: fleet_error_code(&e), message: e.to_string(), data: serde_json::to_value(&e).ok() }
    }
}

/// A structurally valid call. `id` is `None` for notifications.
#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub id: Option<Value>,
    pub method: String,
    pub params: Value,
}

/// Checks the envelope. On failure returns the id to answer with.
pub fn parse_request(v: Value) -> Result<Request, (Value, RpcError)> {
    let Value::Object(mut obj) = v else {
        return Err((Value::Null, RpcError::invalid_request("request must be an object")));
    };
    let id = obj.remove("id");
    let reply_id = match &id {
        Some(v @ (Value::Null | Value::Number(_) | Value::String(_))) => v.clone(),
        Some(_) => return Err((Value::Null, RpcError::invalid_request("id must be a string, number or null"))),
        None => Value::Null,
    };
    if obj.get("jsonrpc") != Some(&Value::String("2.0".into())) {
        return Err((reply_id, RpcError::invalid_request("jsonrpc must be \"2.0\"")));
    }
    let method = match obj.remove("method") {
        Some(Value::String(m)) => m,
        _ => return Err((reply_id, RpcError::invalid_request("method must be a string"))),
    };
    let params = match obj.remove("params") {
        None => Value::Object(Map::new()),
        Some(p @ (Value::Object(_) | Value::Array(_))) => p,
        Some(_) => return Err((reply_id, RpcError::invalid_request("params must be an object or array"))),
    };
    Ok(Request { id, method, params })
}

pub fn success(id: Value, result: Value) -> Value {
    json!({ "jsonrpc": "2.0", "result": result, "id": id })
}

pub fn failure(id: Value, error: RpcError) -> Value {
    json!({ "jsonrpc": "2.0", "error": error, "id": id })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_checks() {
        let ok = parse_request(json!({"jsonrpc": "2.0", "method": "ask", "params": {"text": "hi"}, "id": 7})).unwrap();
        assert_eq!((ok.id, ok.method.as_str()), (Some(json!(7)), "ask"));
        let note = parse_request(json!({"jsonrpc": "2.0", "method": "ask"})).unwrap();
        assert_eq!((note.id, note.params), (None, json!({})));
        let (id, e) = parse_request(json!({"jsonrpc": "1.0", "method": "ask", "id": "a"})).unwrap_err();
        assert_eq!((id, e.code), (json!("a"), INVALID_REQUEST));
        assert_eq!(parse_request(json!([1])).unwrap_err().1.code, INVALID_REQUEST);
        assert_eq!(parse_request(json!({"jsonrpc": "2.0", "method": 1, "id": 1})).unwrap_err().1.code, INVALID_REQUEST);
        assert_eq!(
            parse_request(json!({"jsonrpc": "2.0", "method": "m", "id": {}})).unwrap_err().1.code,
            INVALID_REQUEST
        );
    }

    #[test]
    fn fleet_errors_map_to_distinct_codes() {
        let errors = [
            FleetError::UnknownEngine("9".into()),
            FleetError::UnknownSubsystem("x".into()),
            FleetError::UnknownCharacteristic("x".into()),
            FleetError::DuplicateEngineId(1),
            FleetError::Schema("x".into()),
            FleetError::Expr(jarvis_core::fleet::ExprError::UnknownIdentifier("q".into())),
            FleetError::DependencyCycle(vec!["A".into(), "A".into()]),
            FleetError::Eval { target: "x".into(), reason: "y".into() },
            FleetError::HistoryOrder { last: 2.0, given: 1.0 },
        ];
        let codes: std::collections::BTreeSet<i64> = errors.iter().map(fleet_error_code).collect();
        assert_eq!(codes.len(), errors.len());
        assert!(codes.iter().all(|c| (-32099..=-32000).contains(c)));
    }
}
