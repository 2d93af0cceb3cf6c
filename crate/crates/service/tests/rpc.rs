use std::collections::BTreeSet;
use std::time::Duration;

use jarvis_core::assets::DEMO_FLEET;
use jarvis_core::fleet::{apology, Apology, FleetFile, SystemResponse};
use jarvis_core::{FleetSnapshot, Highlight, Jarvis};
use jarvis_service::rpc::*;
use jarvis_service::{serve, LogEntry, RequestLog, Service};
use serde_json::{json, Value};
use tokio::sync::oneshot;

struct Server {
    url: String,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<()>,
}

impl Server {
    async fn start(service: Service) -> Server {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let url = format!("http://{}/rpc", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel::<()>();
        let task = tokio::spawn(async move {
            serve(listener, service, async {
                let _ = rx.await;
            })
            .await
            .unwrap();
        });
        Server { url, stop: Some(tx), task }
    }

    async fn demo() -> Server {
        Server::start(Service::plain(Jarvis::demo())).await
    }

    async fn raw(&self, body: &str) -> (u16, String) {
        let r = reqwest::Client::new()
            .post(&self.url)
            .header("content-type", "application/json")
            .body(body.to_string())
            .send()
            .await
            .unwrap();
        (r.status().as_u16(), r.text().await.unwrap())
    }

    async fn call(&self, method: &str, params: Value) -> Value {
        let body = json!({"jsonrpc": "2.0", "method": method, "params": params, "id": 1});
        let (_, text) = self.raw(&body.to_string()).await;
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["jsonrpc"], "2.0");
        assert_eq!(v["id"], 1);
        v
    }

    async fn ok(&self, method: &str, params: Value) -> Value {
        let v = self.call(method, params).await;
        assert!(v.get("error").is_none(), "{v}");
        v["result"].clone()
    }

    async fn ask(&self, text: &str) -> SystemResponse {
        serde_json::from_value(self.ok("ask", json!({ "text": text })).await).unwrap()
    }

    async fn error_code(&self, method: &str, params: Value) -> i64 {
        let v = self.call(method, params).await;
        v["error"]["code"].as_i64().unwrap_or_else(|| panic!("expected error, got {v}"))
    }

    async fn stop(mut self) {
        let _ = self.stop.take().unwrap().send(());
        tokio::time::timeout(Duration::from_secs(10), self.task).await.unwrap().unwrap();
    }
}

fn engine_nine() -> Value {
    let doc: Value = serde_json::from_str(DEMO_FLEET).unwrap();
    let mut e = doc["engines"][0].clone();
    e["vr_id"] = json!(9);
    e["label"] = json!("9");
    let hpc = &mut e["subsystems"]["HPC"];
    hpc["characteristics"]["Efficiency"] = json!(99.5);
    hpc["characteristics"]["Speed"] = json!(77.25);
    hpc["history"] = json!([[0.0, hpc["characteristics"].clone()]]);
    e
}

#[tokio::test]
async fn sample_answers_over_http() {
    let s = Server::demo().await;
    let r = s.call("ask", json!({"text": "Which engine's HPC is running at the highest efficiency?"})).await;
    assert_eq!(
        r["result"],
        json!({"engineID": 0, "subsystem": "HPC", "message": "HPC of engine 0 has the highest value of Efficiency. It is equal to 88.1635"})
    );
    let r = s.ask("At what speed is HPC of Engine 3 running at?").await;
    assert_eq!(r.message, "HPC of engine 3 has Speed equal to 80.0");
    let r = s.ask("colorless green ideas sleep furiously").await;
    assert_eq!(r, SystemResponse { engine_id: None, subsystem: None, message: apology(Apology::NoMatch).into() });
    s.stop().await;
}

#[tokio::test]
async fn protocol_errors() {
    let s = Server::demo().await;
    let (status, text) = s.raw("{\"jsonrpc\": \"2.0\", \"method\": ").await;
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!((status, v["error"]["code"].as_i64(), v["id"].clone()), (200, Some(PARSE_ERROR), Value::Null));

    let v: Value = serde_json::from_str(&s.raw(r#"{"jsonrpc":"2.0","method":"fly","id":"q"}"#).await.1).unwrap();
    assert_eq!((v["error"]["code"].as_i64(), v["id"].clone()), (Some(METHOD_NOT_FOUND), json!("q")));

    assert_eq!(s.error_code("ask", json!({"txt": "hello"})).await, INVALID_PARAMS);
    assert_eq!(s.error_code("update_values", json!({"engine_id": "three"})).await, INVALID_PARAMS);

    let v: Value = serde_json::from_str(&s.raw(r#"{"jsonrpc":"1.0","method":"ask","id":4}"#).await.1).unwrap();
    assert_eq!((v["error"]["code"].as_i64(), v["id"].clone()), (Some(INVALID_REQUEST), json!(4)));
    let v: Value = serde_json::from_str(&s.raw("[]").await.1).unwrap();
    assert_eq!(v["error"]["code"].as_i64(), Some(INVALID_REQUEST));
    s.stop().await;
}

#[tokio::test]
async fn batches_and_notifications() {
    let s = Server::demo().await;
    let (status, body) = s.raw(r#"{"jsonrpc":"2.0","method":"ask","params":{"text":"Show engine 2."}}"#).await;
    assert_eq!((status, body.as_str()), (204, ""));

    let batch = json!([
        {"jsonrpc": "2.0", "method": "ask", "params": {"text": "Show engine 2."}, "id": "a"},
        {"jsonrpc": "2.0", "method": "ask", "params": {"text": "Show engine 1."}},
        {"jsonrpc": "2.0", "method": "nope", "id": 2},
        5,
        {"jsonrpc": "2.0", "method": "get_fleet_state", "id": 3}
    ]);
    let v: Value = serde_json::from_str(&s.raw(&batch.to_string()).await.1).unwrap();
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 4);
    assert_eq!(items[0]["id"], "a");
    assert_eq!(items[0]["result"]["engineID"], 2);
    assert_eq!((items[1]["id"].clone(), items[1]["error"]["code"].as_i64()), (json!(2), Some(METHOD_NOT_FOUND)));
    assert_eq!((items[2]["id"].clone(), items[2]["error"]["code"].as_i64()), (Value::Null, Some(INVALID_REQUEST)));
    assert_eq!(items[3]["id"], 3);
    // The notification in the batch still ran: it was the last ask before the snapshot.
    assert_eq!(items[3]["result"]["highlight"], json!({"engine_id": 1, "subsystem": null}));
    s.stop().await;
}

#[tokio::test]
async fn concurrent_asks_match_serial_answers() {
    let questions = [
        "Which engine's HPC is running at the highest efficiency?",
        "At what speed is HPC of Engine 3 running at?",
        "Where is the fourth engine right now?",
        "Identify which engine's IPC is the closest to choke.",
        "Which engine's fan is running at the lowest efficiency?",
        "Where is the engine with the highest average efficiency of fleet B?",
        "Compute the average pressure ratio after 80 hours of flying time for HPC in Engine 3",
        "blah blah",
    ];
    let serial = Jarvis::demo();
    let expected: Vec<SystemResponse> = questions.iter().map(|q| serial.ask(q)).collect();
    let s = Server::demo().await;
    let client = reqwest::Client::new();
    let mut tasks = Vec::new();
    for worker in 0..16 {
        let (client, url) = (client.clone(), s.url.clone());
        tasks.push(tokio::spawn(async move {
            let mut got = Vec::new();
            for round in 0..10 {
                let i = (worker + round) % questions.len();
                let body = json!({"jsonrpc": "2.0", "method": "ask", "params": {"text": questions[i]}, "id": worker * 100 + round});
                let v: Value = client.post(&url).json(&body).send().await.unwrap().json().await.unwrap();
                assert_eq!(v["id"], worker * 100 + round);
                got.push((i, serde_json::from_value::<SystemResponse>(v["result"].clone()).unwrap()));
            }
            got
        }));
    }
    for t in tasks {
        for (i, r) in t.await.unwrap() {
            assert_eq!(r, expected[i], "{}", questions[i]);
        }
    }
    s.stop().await;
}

#[tokio::test]
async fn reads_interleaved_with_writes_see_whole_states() {
    let s = Server::demo().await;
    let speeds: Vec<f64> = (0..20).map(|i| 60.0 + i as f64 * 0.5).collect();
    let allowed: BTreeSet<String> = std::iter::once(80.0)
        .chain(speeds.iter().copied())
        .map(|v| format!("HPC of engine 3 has Speed equal to {}", jarvis_core::fleet::format_value(v)))
        .collect();
    let client = reqwest::Client::new();
    let writer = {
        let (client, url, speeds) = (client.clone(), s.url.clone(), speeds.clone());
        tokio::spawn(async move {
            for v in speeds {
                let body = json!({"jsonrpc": "2.0", "method": "update_values", "id": 1,
                    "params": {"engine_id": 3, "subsystem": "HPC", "values": {"Speed": v}}});
                let r: Value = client.post(&url).json(&body).send().await.unwrap().json().await.unwrap();
                assert_eq!(r["result"]["changed"]["Speed"], v);
            }
        })
    };
    let mut readers = Vec::new();
    for _ in 0..4 {
        let (client, url) = (client.clone(), s.url.clone());
        readers.push(tokio::spawn(async move {
            let mut seen = Vec::new();
            for _ in 0..25 {
                let body = json!({"jsonrpc": "2.0", "method": "ask", "id": 2,
                    "params": {"text": "At what speed is HPC of Engine 3 running at?"}});
                let r: Value = client.post(&url).json(&body).send().await.unwrap().json().await.unwrap();
                seen.push(r["result"]["message"].as_str().unwrap().to_string());
            }
            seen
        }));
    }
    writer.await.unwrap();
    for r in readers {
        for m in r.await.unwrap() {
            assert!(allowed.contains(&m), "{m}");
        }
    }
    assert_eq!(
        s.ask("At what speed is HPC of Engine 3 running at?").await.message,
        "HPC of engine 3 has Speed equal to 69.5"
    );
    s.stop().await;
}

#[tokio::test]
async fn add_engine_is_queryable() {
    let s = Server::demo().await;
    assert_eq!(s.ok("add_engine", json!({ "engine": engine_nine() })).await, json!({"vr_id": 9}));
    let r = s.ask("At what speed is HPC of Engine 9 running at?").await;
    assert_eq!(r.message, "HPC of engine 9 has Speed equal to 77.25");
    // Linear scan including the new engine.
    let snap: FleetSnapshot = serde_json::from_value(s.ok("get_fleet_state", json!({})).await).unwrap();
    assert_eq!(snap.engines.len(), 9);
    let top = snap
        .engines
        .iter()
        .filter_map(|e| Some((e.vr_id, e.subsystems.get(&"HPC".parse().unwrap())?.value("Efficiency")?)))
        .fold(None::<(i64, f64)>, |acc, (id, v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((id, v)),
        });
    assert_eq!(s.ask("Which engine's HPC is running at the highest efficiency?").await.engine_id, top.map(|t| t.0));
    assert_eq!(top.map(|t| t.0), Some(9));

    assert_eq!(s.error_code("add_engine", json!({ "engine": engine_nine() })).await, DUPLICATE_ENGINE_ID);
    let mut bad = engine_nine();
    bad["vr_id"] = json!(10);
    bad["latitude"] = json!(123.0);
    let v = s.call("add_engine", json!({ "engine": bad })).await;
    assert_eq!(v["error"]["code"].as_i64(), Some(SCHEMA_ERROR));
    assert!(v["error"]["message"].as_str().unwrap().contains("latitude"), "{v}");
    s.stop().await;
}

#[tokio::test]
async fn update_methods_over_rpc() {
    let s = Server::demo().await;
    let spec = json!({"characteristic": "SS", "func_args": ["MF", "PR"], "func_expr": "if sub == 'LPC' { MF*PR } else { MF+PR }"});
    let r = s.ok("add_update_method", spec).await;
    assert_eq!(r, json!({"characteristic": "SS", "func_args": ["MassFlow", "PressureRatio"]}));

    let snap: FleetSnapshot = serde_json::from_value(s.ok("get_fleet_state", json!({})).await).unwrap();
    let lpc = &snap.engines.iter().find(|e| e.vr_id == 2).unwrap().subsystems[&"LPC".parse().unwrap()];
    let pr = lpc.value("PressureRatio").unwrap();
    let r = s.ok("update_values", json!({"engine_id": 2, "subsystem": "LPC", "values": {"MF": 0.5}})).await;
    assert_eq!(r["changed"]["MassFlow"], 0.5);
    assert!((r["changed"]["SS"].as_f64().unwrap() - 0.5 * pr).abs() <= 1e-12, "{r}");

    let cyc = s
        .call("add_update_method", json!({"characteristic": "Speed", "func_args": ["Speed"], "func_expr": "Speed + 1"}))
        .await;
    assert_eq!(cyc["error"]["code"].as_i64(), Some(DEPENDENCY_CYCLE));
    let bad =
        s.call("add_update_method", json!({"characteristic": "T", "func_args": ["MF"], "func_expr": "MF * (2"})).await;
    assert_eq!(bad["error"]["code"].as_i64(), Some(EXPR_SYNTAX_ERROR));
    assert!(bad["error"]["data"]["Expr"]["Syntax"]["position"].is_u64(), "{bad}");
    s.stop().await;
}

#[tokio::test]
async fn update_values_write_then_read_and_atomicity() {
    let s = Server::demo().await;
    let r = s.ok("update_values", json!({"engine_id": 3, "subsystem": "HPC", "values": {"Speed": 85}})).await;
    assert_eq!(r, json!({"changed": {"Speed": 85.0}}));
    assert_eq!(
        s.ask("At what speed is HPC of Engine 3 running at?").await.message,
        "HPC of engine 3 has Speed equal to 85.0"
    );

    let before = s.ok("get_fleet_state", json!({})).await;
    assert_eq!(
        s.error_code("update_values", json!({"engine_id": 42, "subsystem": "HPC", "values": {"Speed": 1}})).await,
        UNKNOWN_ENGINE
    );
    assert_eq!(
        s.error_code("update_values", json!({"engine_id": 3, "subsystem": "XPC", "values": {"Speed": 1}})).await,
        UNKNOWN_SUBSYSTEM
    );
    let hist = json!({"engine_id": 3, "subsystem": "HPC", "values": {"Speed": 1}, "flight_hours": 0.5});
    assert_eq!(s.error_code("update_values", hist).await, HISTORY_ORDER);
    assert_eq!(s.ok("get_fleet_state", json!({})).await, before);
    s.stop().await;
}

#[tokio::test]
async fn fleet_state_and_highlight() {
    let s = Server::demo().await;
    let snap: FleetSnapshot = serde_json::from_value(s.ok("get_fleet_state", json!({})).await).unwrap();
    assert_eq!(snap.engines, FleetFile::from_json(DEMO_FLEET).unwrap().engines);
    assert_eq!(snap.highlight, None);

    s.ask("Which engine's HPC is running at the highest efficiency?").await;
    let snap: FleetSnapshot = serde_json::from_value(s.ok("get_fleet_state", json!({})).await).unwrap();
    assert_eq!(snap.highlight, Some(Highlight { engine_id: 0, subsystem: Some("HPC".into()) }));

    s.ask("zzz").await;
    let snap: FleetSnapshot = serde_json::from_value(s.ok("get_fleet_state", json!({})).await).unwrap();
    assert_eq!(snap.highlight, None);
    s.stop().await;
}

#[tokio::test]
async fn request_log_is_flushed_on_shutdown() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("requests.jsonl");
    let service = Service::new(Jarvis::demo(), RequestLog::open(&path).unwrap(), Box::new(jarvis_service::Identity));
    let s = Server::start(service).await;
    s.ask("Show engine 1.").await;
    s.ok("get_fleet_state", json!({})).await;
    s.call("fly", json!({})).await;
    s.stop().await;
    let text = std::fs::read_to_string(&path).unwrap();
    let entries: Vec<LogEntry> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let methods: Vec<&str> = entries.iter().map(|e| e.method.as_str()).collect();
    assert_eq!(methods, ["ask", "get_fleet_state", "fly"]);
    assert!(entries.iter().all(|e| chrono_like(&e.timestamp)));
}

fn chrono_like(ts: &str) -> bool {
    ts.len() >= 20 && ts.ends_with('Z') && ts.as_bytes()[4] == b'-' && ts.contains('T')
}
