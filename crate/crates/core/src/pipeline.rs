//! The speech-bundle flow: classify, clear, query, answer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets;
use crate::fleet::{
    answer, sync, Apology, Context, EngineRecord, Fleet, FleetError, FleetFile, MethodSpec, SubsystemKind,
    SystemResponse, UpdateMethod, Values,
};
use crate::intent::{clear_slots, ClearedCommand, IntentError, IntentModel, ParsedCommand};
use crate::kg::{ntriples, seed_tbox, Graph, Term};
use crate::sparql::{parse_query, SparqlError, TemplateSet};

#[derive(Debug, Error)]
pub enum SetupError {
    #[error("fleet: {0}")]
    Fleet(#[from] FleetError),
    #[error("training file: {0}")]
    Intent(#[from] IntentError),
    #[error("no query template for intent {0:?}")]
    MissingTemplate(String),
    #[error("query template {intent:?}: {source}")]
    Template { intent: String, source: SparqlError },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateRequest {
    pub engine_id: i64,
    pub subsystem: String,
    pub values: Values,
    #[serde(default)]
    pub flight_hours: Option<f64>,
}

/// What the visualization should point at after an answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    pub engine_id: i64,
    pub subsystem: Option<String>,
}

impl Highlight {
    pub fn from_response(r: &SystemResponse) -> Option<Highlight> {
        r.engine_id.map(|engine_id| Highlight { engine_id, subsystem: r.subsystem.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetSnapshot {
    pub engines: Vec<EngineRecord>,
    pub methods: Vec<MethodSpec>,
    pub highlight: Option<Highlight>,
}

/// Every intermediate of one `ask`, for diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AskTrace {
    pub parsed: Option<ParsedCommand>,
    pub cleared: Option<ClearedCommand>,
    pub error: Option<String>,
    pub response: SystemResponse,
}

/// Knowledge graph, fleet and intent model behind one server.
#[derive(Clone, Debug)]
pub struct Jarvis {
    graph: Graph,
    fleet: Fleet,
    model: IntentModel,
    templates: TemplateSet,
}

/// Every intent must have a template that parses once filled in.
pub fn check_templates(model: &IntentModel, templates: &TemplateSet) -> Result<(), SetupError> {
    for spec in model.specs() {
        let t = templates.get(&spec.name).ok_or_else(|| SetupError::MissingTemplate(spec.name.clone()))?;
        let dummy: BTreeMap<String, Term> = t.placeholders().into_iter().map(|p| (p, Term::text("x"))).collect();
        let wrap = |source| SetupError::Template { intent: spec.name.clone(), source };
        parse_query(&t.instantiate(&dummy).map_err(wrap)?).map_err(wrap)?;
    }
    Ok(())
}

impl Jarvis {
    pub fn new(fleet: FleetFile, model: IntentModel, templates: TemplateSet) -> Result<Self, SetupError> {
        check_templates(&model, &templates)?;
        let fleet = Fleet::from_file(fleet)?;
        let mut graph = Graph::new();
        seed_tbox(&mut graph);
        for e in fleet.engines() {
            sync::insert_engine(&mut graph, e);
        }
        graph.materialize();
        Ok(Jarvis { graph, fleet, model, templates })
    }

    /// Loads from file contents.
    pub fn from_sources(fleet_json: &str, training: &str, templates: TemplateSet) -> Result<Self, SetupError> {
        Jarvis::new(FleetFile::from_json(fleet_json)?, IntentModel::from_training_text(training)?, templates)
    }

    /// The shipped demo fleet, training file and templates.
    pub fn demo() -> Self {
        Jarvis::from_sources(assets::DEMO_FLEET, assets::TRAINING, assets::templates())
            .expect("shipped assets are valid")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn fleet(&self) -> &Fleet {
        &self.fleet
    }

    pub fn model(&self) -> &IntentModel {
        &self.model
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    pub fn context(&self) -> Context<'_> {
        Context { graph: &self.graph, fleet: &self.fleet, templates: &self.templates }
    }

    pub fn ask(&self, text: &str) -> SystemResponse {
        self.explain(text).response
    }

    pub fn explain(&self, text: &str) -> AskTrace {
        let Some(parsed) = self.model.classify(text) else {
            return AskTrace {
                parsed: None,
                cleared: None,
                error: None,
                response: SystemResponse::apology(Apology::NoMatch),
            };
        };
        let cleared = match clear_slots(&parsed, self.model.registry(), &self.graph) {
            Ok(c) => c,
            Err(e) => {
                return AskTrace {
                    parsed: Some(parsed),
                    cleared: None,
                    error: Some(e.to_string()),
                    response: SystemResponse::apology(Apology::SlotClearing),
                }
            }
        };
        let (response, error) = match answer(&self.context(), &cleared) {
            Ok(r) => (r, None),
            Err(e) => (SystemResponse::apology(e.apology()), Some(e.to_string())),
        };
        AskTrace { parsed: Some(parsed), cleared: Some(cleared), error, response }
    }

    pub fn add_engine(&mut self, engine: EngineRecord) -> Result<(), FleetError> {
        self.fleet.add_engine(engine.clone())?;
        sync::insert_engine(&mut self.graph, &engine);
        self.graph.materialize();
        Ok(())
    }

    pub fn add_update_method(&mut self, spec: &MethodSpec) -> Result<UpdateMethod, FleetError> {
        let method = self.fleet.register_method(spec)?;
        sync::replace_function(&mut self.graph, &method);
        self.graph.materialize();
        Ok(method)
    }

    /// Applies new values and returns every characteristic that changed.
    pub fn update_values(&mut self, req: &UpdateRequest) -> Result<Values, FleetError> {
        let kind: SubsystemKind = req.subsystem.parse()?;
        let applied = self.fleet.apply_updates(req.engine_id, kind, &req.values, req.flight_hours)?;
        sync::replace_values(&mut self.graph, req.engine_id, kind, &applied.record, applied.changed.keys());
        self.graph.materialize();
        Ok(applied.changed)
    }

    pub fn snapshot(&self, highlight: Option<Highlight>) -> FleetSnapshot {
        FleetSnapshot {
            engines: self.fleet.engines().cloned().collect(),
            methods: self
                .fleet
                .methods()
                .iter()
                .map(|m| MethodSpec {
                    characteristic: m.target.clone(),
                    func_args: m.func_args.clone(),
                    func_expr: m.func_expr.clone(),
                })
                .collect(),
            highlight,
        }
    }

    pub fn export_graph(&self) -> String {
        ntriples::export(&self.graph)
    }
}
