//! `jarvis`: operator entry point for the fleet knowledge-graph server.

mod settings;

use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use jarvis_core::assets;
use jarvis_core::fleet::{FleetError, FleetFile};
use jarvis_core::intent::IntentModel;
use jarvis_core::sparql::TemplateSet;
use jarvis_core::{check_templates, Jarvis};
use jarvis_service::{RequestLog, ServerConfig, Service};
use serde_json::Value;
use settings::{FileConfig, Overrides};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "jarvis", version, about = "Fleet analytics over a knowledge graph, asked in plain English")]
struct Cli {
    /// Fleet data file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    fleet: Option<PathBuf>,
    /// Training file with intents.
    #[arg(long, global = true, value_name = "PATH")]
    intents: Option<PathBuf>,
    /// Directory of `<intent>.rq` query templates.
    #[arg(long, global = true, value_name = "DIR")]
    templates: Option<PathBuf>,
    #[arg(long, global = true)]
    port: Option<u16>,
    /// Request log (JSON lines).
    #[arg(long, global = true, value_name = "PATH")]
    log: Option<PathBuf>,
    /// TOML config file; flags and environment take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the JSON-RPC server.
    Serve,
    /// Answer one question in-process and print the response JSON.
    AskOnce {
        #[arg(required = true, num_args = 1..)]
        text: Vec<String>,
    },
    /// Send one question to a running server.
    Ask {
        /// Endpoint; defaults to the local server on the configured port.
        #[arg(long)]
        url: Option<String>,
        #[arg(required = true, num_args = 1..)]
        text: Vec<String>,
    },
    /// Read questions from stdin, one per line, answering each in-process.
    Repl,
    /// Write the demo fleet, training file and templates into a directory.
    SeedDemo { dir: PathBuf },
    /// Dump the knowledge graph as N-Triples (`-` for stdout).
    ExportGraph { out: PathBuf },
    /// Check fleet, training and template files.
    Validate,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_RUNTIME, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let Some(command) = cli.command.as_ref() else {
        let _ = Cli::command().print_help();
        return ExitCode::from(EXIT_USAGE);
    };
    match run(&cli, command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("jarvis: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn config(cli: &Cli) -> Result<ServerConfig, Failure> {
    let file = cli.config.as_deref().map(FileConfig::read).transpose().map_err(invalid)?;
    let flags = Overrides {
        port: cli.port,
        fleet: cli.fleet.clone(),
        intents: cli.intents.clone(),
        templates: cli.templates.clone(),
        log: cli.log.clone(),
    };
    settings::resolve(file, |k| std::env::var(k).ok(), &flags).map_err(invalid)
}

fn load(cfg: &ServerConfig) -> Result<Jarvis, Failure> {
    cfg.load().map_err(|e| invalid(e.to_string()))
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let line = serde_json::to_string(v).map_err(|e| runtime(e.to_string()))?;
    println!("{line}");
    Ok(())
}

fn run(cli: &Cli, command: &Command) -> Result<(), Failure> {
    let cfg = config(cli)?;
    match command {
        Command::Serve => serve(&cfg),
        Command::AskOnce { text } => print_json(&load(&cfg)?.ask(&text.join(" "))),
        Command::Ask { url, text } => {
            let url = url.clone().unwrap_or_else(|| format!("http://127.0.0.1:{}/rpc", cfg.port));
            let client = jarvis_client::JarvisClient::new(url);
            let rt = tokio::runtime::Runtime::new().map_err(|e| runtime(e.to_string()))?;
            let r = rt.block_on(client.ask(&text.join(" "))).map_err(|e| runtime(e.to_string()))?;
            print_json(&r)
        }
        Command::Repl => repl(&load(&cfg)?),
        Command::SeedDemo { dir } => {
            assets::write_bundle(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
            eprintln!("wrote fleet.json, intents.md and templates/ to {}", dir.display());
            Ok(())
        }
        Command::ExportGraph { out } => {
            let text = load(&cfg)?.export_graph();
            if out == Path::new("-") {
                io::stdout().write_all(text.as_bytes()).map_err(|e| runtime(e.to_string()))
            } else {
                std::fs::write(out, text).map_err(|e| runtime(format!("{}: {e}", out.display())))
            }
        }
        Command::Validate => validate(&cfg),
    }
}

fn serve(cfg: &ServerConfig) -> Result<(), Failure> {
    let jarvis = load(cfg)?;
    let log = match &cfg.log {
        Some(p) => RequestLog::open(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
        None => RequestLog::disabled(),
    };
    let service = Service::new(jarvis, log, Box::new(jarvis_service::Identity));
    let rt = tokio::runtime::Runtime::new().map_err(|e| runtime(e.to_string()))?;
    rt.block_on(async {
        let addr = cfg.addr();
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|source| runtime(jarvis_service::ServeError::Bind { addr, source }.to_string()))?;
        eprintln!("listening on http://{}/rpc", listener.local_addr().map_err(|e| runtime(e.to_string()))?);
        jarvis_service::serve(listener, service, jarvis_service::shutdown_signal())
            .await
            .map_err(|e| runtime(e.to_string()))
    })
}

fn repl(jarvis: &Jarvis) -> Result<(), Failure> {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    loop {
        if interactive {
            eprint!("> ");
            let _ = io::stderr().flush();
        }
        let mut line = String::new();
        if stdin.lock().read_line(&mut line).map_err(|e| runtime(e.to_string()))? == 0 {
            return Ok(());
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        print_json(&jarvis.ask(line))?;
    }
}

/// Field path of the second engine carrying `id`, for duplicate reports.
fn duplicate_path(text: &str, id: i64) -> String {
    let doc: Value = serde_json::from_str(text).unwrap_or(Value::Null);
    let engines = doc["engines"].as_array().cloned().unwrap_or_default();
    let hits: Vec<usize> =
        engines.iter().enumerate().filter(|(_, e)| e["vr_id"].as_i64() == Some(id)).map(|(i, _)| i).collect();
    match hits.as_slice() {
        [first, second, ..] => format!("engines[{second}].vr_id (same as engines[{first}])"),
        _ => "engines[].vr_id".into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn validate(cfg: &ServerConfig) -> Result<(), Failure> {
    let (fleet_name, fleet_text) = match &cfg.fleet {
        Some(p) => (p.display().to_string(), read(p)?),
        None => ("<bundled fleet>".into(), assets::DEMO_FLEET.into()),
    };
    let fleet = FleetFile::from_json(&fleet_text).map_err(|e| match e {
        FleetError::DuplicateEngineId(id) => invalid(format!("{fleet_name}: {}: {e}", duplicate_path(&fleet_text, id))),
        e => invalid(format!("{fleet_name}: {e}")),
    })?;

    let (intents_name, intents_text) = match &cfg.intents {
        Some(p) => (p.display().to_string(), read(p)?),
        None => ("<bundled intents>".into(), assets::TRAINING.into()),
    };
    let model = IntentModel::from_training_text(&intents_text).map_err(|e| invalid(format!("{intents_name}: {e}")))?;

    let (templates_name, templates) = match &cfg.templates {
        Some(d) => {
            (d.display().to_string(), TemplateSet::load_dir(d).map_err(|e| invalid(format!("{}: {e}", d.display())))?)
        }
        None => ("<bundled templates>".into(), assets::templates()),
    };
    check_templates(&model, &templates).map_err(|e| invalid(format!("{templates_name}: {e}")))?;
    let n_templates: usize = model.specs().iter().map(|s| s.templates.len()).sum();
    println!(
        "ok: {} engines, {} intents ({n_templates} sentences), {} query templates",
        fleet.engines.len(),
        model.specs().len(),
        templates.iter().count()
    );
    Ok(())
}
