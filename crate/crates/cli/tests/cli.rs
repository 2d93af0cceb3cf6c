use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;

const GOLDEN: &str = r#"{"engineID":3,"subsystem":"HPC","message":"HPC of engine 3 has Speed equal to 80.0"}"#;

fn jarvis() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_jarvis"));
    for k in ["JARVIS_PORT", "JARVIS_FLEET", "JARVIS_INTENTS", "JARVIS_TEMPLATES", "JARVIS_LOG"] {
        c.env_remove(k);
    }
    c
}

fn run(args: &[&str]) -> Output {
    jarvis().args(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn ask_once_prints_the_sample_answer() {
    let out = run(&["ask-once", "At what speed is HPC of Engine 3 running at?"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(text(&out.stdout), format!("{GOLDEN}\n"));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("Usage"), "{}", text(&out.stdout));
    assert_eq!(run(&["fly"]).status.code(), Some(1));
    assert_eq!(run(&["ask-once"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn duplicate_fleet(dir: &Path) -> std::path::PathBuf {
    let mut doc: Value = serde_json::from_str(jarvis_core::assets::DEMO_FLEET).unwrap();
    let engines = doc["engines"].as_array_mut().unwrap();
    engines[5]["vr_id"] = engines[2]["vr_id"].clone();
    let path = dir.join("dup.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

#[test]
fn validate_reports_duplicate_ids_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = duplicate_fleet(dir.path());
    let out = run(&["validate", "--fleet", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("engines[5].vr_id") && err.contains("engine id 2 already exists"), "{err}");
    // Serving the same file fails the same way before binding.
    assert_eq!(run(&["ask-once", "--fleet", path.to_str().unwrap(), "hi"]).status.code(), Some(2));

    let ok = run(&["validate"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(text(&ok.stdout).starts_with("ok: 8 engines"), "{}", text(&ok.stdout));
}

#[test]
fn seeded_bundle_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("bundle");
    assert_eq!(run(&["seed-demo", d.to_str().unwrap()]).status.code(), Some(0));
    let args = |extra: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
        for (flag, name) in [("--fleet", "fleet.json"), ("--intents", "intents.md"), ("--templates", "templates")] {
            v.push(flag.into());
            v.push(d.join(name).to_string_lossy().into());
        }
        v
    };
    assert_eq!(jarvis().args(args(&["validate"])).output().unwrap().status.code(), Some(0));
    let out = jarvis().args(args(&["ask-once", "At what speed is HPC of Engine 3 running at?"])).output().unwrap();
    assert_eq!(text(&out.stdout), format!("{GOLDEN}\n"));

    std::fs::remove_file(d.join("templates/closest.rq")).unwrap();
    let out = jarvis().args(args(&["validate"])).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("closest"), "{}", text(&out.stderr));
}

#[test]
fn export_graph_writes_ntriples() {
    let out = run(&["export-graph", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let nt = text(&out.stdout);
    assert!(nt.lines().all(|l| l.ends_with(" .")));
    assert_eq!(
        nt.lines().filter(|l| l.split_whitespace().nth(1) == Some("<http://jarvis.example/aero#VR_ID>")).count(),
        8
    );

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.nt");
    assert_eq!(run(&["export-graph", p.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(p).unwrap(), nt);
}

#[test]
fn repl_answers_each_line() {
    let mut child = jarvis().arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"At what speed is HPC of Engine 3 running at?\n\nmumble\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<String> = text(&out.stdout).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], GOLDEN);
    assert_eq!(serde_json::from_str::<Value>(&lines[1]).unwrap()["engineID"], Value::Null);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

struct Running(Child);

impl Drop for Running {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn wait_until_listening(port: u16) {
    let deadline = Instant::now() + Duration::from_secs(20);
    while std::net::TcpStream::connect(("127.0.0.1", port)).is_err() {
        assert!(Instant::now() < deadline, "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    }
}

#[test]
fn http_ask_matches_ask_once_and_log_is_flushed() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("requests.jsonl");
    let cfg = dir.path().join("jarvis.toml");
    let port = free_port();
    // Port from the environment beats the config file.
    std::fs::write(&cfg, format!("port = 1\nlog = {:?}\n", log.to_str().unwrap())).unwrap();
    let mut server = Running(
        jarvis()
            .args(["serve", "--config", cfg.to_str().unwrap()])
            .env("JARVIS_PORT", port.to_string())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap(),
    );
    wait_until_listening(port);
    let url = format!("http://127.0.0.1:{port}/rpc");
    for q in [
        "At what speed is HPC of Engine 3 running at?",
        "Which engine's HPC is running at the highest efficiency?",
        "??",
    ] {
        let remote = run(&["ask", "--url", &url, q]);
        let local = run(&["ask-once", q]);
        assert_eq!(remote.status.code(), Some(0), "{}", text(&remote.stderr));
        assert_eq!(text(&remote.stdout), text(&local.stdout));
    }
    let status = Command::new("kill").args(["-TERM", &server.0.id().to_string()]).status().unwrap();
    assert!(status.success());
    let code = server.0.wait().unwrap().code();
    let mut err = String::new();
    server.0.stderr.take().unwrap().read_to_string(&mut err).unwrap();
    assert_eq!(code, Some(0), "{err}");
    let lines: Vec<Value> =
        std::fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["method"] == "ask" && l["latency_us"].is_u64() && l["timestamp"].is_string()));
}

#[test]
fn runtime_failures_exit_3() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let out = run(&["serve", "--port", &port]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("cannot bind"), "{}", text(&out.stderr));

    let closed = free_port();
    let out = run(&["ask", "--url", &format!("http://127.0.0.1:{closed}/rpc"), "hello"]);
    assert_eq!(out.status.code(), Some(3));
}
