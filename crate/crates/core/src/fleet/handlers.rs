//! One handler per intent. Each runs the intent's query template against
//! the graph and finishes the numeric work (argmax, nearest, mean) here.

use std::collections::BTreeMap;

use thiserror::Error;

use super::geometry::normalized_boundary_distance;
use super::model::{EngineRecord, SubsystemKind};
use super::response::{format_value, Apology, SystemResponse};
use super::Fleet;
use crate::intent::{trimmed_number, ClearedCommand};
use crate::kg::vocab::{aero, label, vr_id, AERO_NS};
use crate::kg::{Graph, Iri, Pattern, Term};
use crate::sparql::{evaluate, parse_query, BindingRow, SparqlError, TemplateSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HandlerError {
    #[error("unknown engine")]
    UnknownEngine,
    #[error("unknown subsystem")]
    UnknownSubsystem,
    #[error("unknown characteristic")]
    UnknownCharacteristic,
    #[error("unknown fleet")]
    UnknownFleet,
    #[error("no data")]
    NoData,
    #[error("compressor map has no {0} line")]
    NoBoundary(State),
    #[error("no samples past the threshold")]
    NoSamples,
    #[error("slot {0:?} is missing or has the wrong type")]
    BadSlot(String),
    #[error("no handler for intent {0:?}")]
    Unsupported(String),
    #[error("no query template for intent {0:?}")]
    MissingTemplate(String),
    #[error(transparent)]
    Query(#[from] SparqlError),
}

impl HandlerError {
    pub fn apology(&self) -> Apology {
        match self {
            HandlerError::UnknownEngine => Apology::UnknownEngine,
            HandlerError::UnknownSubsystem => Apology::UnknownSubsystem,
            HandlerError::UnknownCharacteristic => Apology::UnknownCharacteristic,
            HandlerError::UnknownFleet => Apology::UnknownFleet,
            HandlerError::NoData => Apology::NoData,
            HandlerError::NoBoundary(_) => Apology::NoBoundary,
            HandlerError::NoSamples => Apology::NoSamples,
            HandlerError::BadSlot(_) => Apology::SlotClearing,
            HandlerError::Unsupported(_) => Apology::Unsupported,
            HandlerError::MissingTemplate(_) | HandlerError::Query(_) => Apology::Internal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Highest,
    Lowest,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Highest => "highest",
            Direction::Lowest => "lowest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum State {
    Stall,
    Choke,
}

impl State {
    pub fn as_str(self) -> &'static str {
        match self {
            State::Stall => "stall",
            State::Choke => "choke",
        }
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Read-only view the handlers answer from.
#[derive(Clone, Copy)]
pub struct Context<'a> {
    pub graph: &'a Graph,
    pub fleet: &'a Fleet,
    pub templates: &'a TemplateSet,
}

impl<'a> Context<'a> {
    fn query(&self, intent: &str, params: &[(&str, Term)]) -> Result<Vec<BindingRow>, HandlerError> {
        let template = self.templates.get(intent).ok_or_else(|| HandlerError::MissingTemplate(intent.to_string()))?;
        let slots: BTreeMap<String, Term> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let text = template.instantiate(&slots)?;
        Ok(evaluate(self.graph, &parse_query(&text)?)?)
    }

    /// The record behind an engine resource, found through its `VR_ID`.
    fn engine(&self, engine: &Iri) -> Result<&'a EngineRecord, HandlerError> {
        let ids = self
            .graph
            .match_pattern(&Pattern::new(Some(engine.clone()), Some(vr_id()), None))
            .map_err(SparqlError::from)?;
        ids.iter()
            .filter_map(|t| t.object.as_literal().and_then(|l| l.as_f64()))
            .find_map(|id| self.fleet.engine(id as i64))
            .ok_or(HandlerError::UnknownEngine)
    }

    fn characteristic_label(&self, name: &str) -> String {
        self.graph
            .match_pattern(&Pattern::new(Some(aero(name)), Some(label()), None))
            .ok()
            .and_then(|ts| ts.iter().filter_map(|t| t.object.as_text().map(str::to_string)).min())
            .unwrap_or_else(|| name.to_string())
    }
}

fn row_id(row: &BindingRow) -> Option<i64> {
    row.get("ID").and_then(Term::as_f64).map(|v| v as i64)
}

fn row_f64(row: &BindingRow, var: &str) -> Option<f64> {
    row.get(var).and_then(Term::as_f64)
}

fn engine_name(e: &EngineRecord) -> Term {
    Term::text(&e.label)
}

pub fn handle_show_engine(ctx: &Context, engine: &Iri) -> Result<SystemResponse, HandlerError> {
    let rec = ctx.engine(engine)?;
    let rows = ctx.query("show_engine", &[("ENGINE_NAME", engine_name(rec))])?;
    let row = rows.iter().find(|r| row_id(r) == Some(rec.vr_id)).ok_or(HandlerError::UnknownEngine)?;
    let (lat, lon) =
        (row_f64(row, "lat").ok_or(HandlerError::NoData)?, row_f64(row, "lon").ok_or(HandlerError::NoData)?);
    Ok(SystemResponse::answer(
        rec.vr_id,
        None,
        format!(
            "Engine {} is currently at latitude {}, longitude {}.",
            rec.vr_id,
            format_value(lat),
            format_value(lon)
        ),
    ))
}

pub fn handle_get_value(
    ctx: &Context,
    engine: &Iri,
    kind: SubsystemKind,
    characteristic: &str,
) -> Result<SystemResponse, HandlerError> {
    let rec = ctx.engine(engine)?;
    let chara = ctx.characteristic_label(characteristic);
    let rows = ctx.query(
        "get_value",
        &[
            ("CHARACTERISTIC", Term::text(&chara)),
            ("SUBSYSTEM", Term::text(kind.as_str())),
            ("ENGINE_NAME", engine_name(rec)),
        ],
    )?;
    let Some(val) = rows.iter().filter(|r| row_id(r) == Some(rec.vr_id)).find_map(|r| row_f64(r, "val")) else {
        return Err(if rec.subsystems.contains_key(&kind) {
            HandlerError::UnknownCharacteristic
        } else {
            HandlerError::UnknownSubsystem
        });
    };
    Ok(SystemResponse::answer(
        rec.vr_id,
        Some(kind.to_string()),
        format!("{kind} of engine {} has {chara} equal to {}", rec.vr_id, format_value(val)),
    ))
}

/// `(vr_id, value)` of every engine whose `kind` subsystem carries `characteristic`.
fn candidates(ctx: &Context, intent: &str, kind: SubsystemKind, chara: &str) -> Result<Vec<(i64, f64)>, HandlerError> {
    let rows = ctx.query(intent, &[("CHARACTERISTIC", Term::text(chara)), ("SUBSYSTEM", Term::text(kind.as_str()))])?;
    let mut out: Vec<(i64, f64)> = rows.iter().filter_map(|r| Some((row_id(r)?, row_f64(r, "val")?))).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(out)
}

/// Smallest key under `better`, ties to the smaller id.
fn pick<T: Copy>(items: &[(i64, T)], better: impl Fn(&T, &T) -> bool) -> Option<(i64, T)> {
    let mut best: Option<(i64, T)> = None;
    for &(id, v) in items {
        match &best {
            Some((bid, bv)) if !(better(&v, bv) || (!better(bv, &v) && id < *bid)) => {}
            _ => best = Some((id, v)),
        }
    }
    best
}

pub fn handle_the_best(
    ctx: &Context,
    kind: SubsystemKind,
    direction: Direction,
    characteristic: &str,
) -> Result<SystemResponse, HandlerError> {
    let chara = ctx.characteristic_label(characteristic);
    let items = candidates(ctx, "the_best", kind, &chara)?;
    let (id, val) = match direction {
        Direction::Highest => pick(&items, |a, b| a > b),
        Direction::Lowest => pick(&items, |a, b| a < b),
    }
    .ok_or(HandlerError::NoData)?;
    Ok(SystemResponse::answer(
        id,
        Some(kind.to_string()),
        format!(
            "{kind} of engine {id} has the {} value of {chara}. It is equal to {}",
            direction.as_str(),
            format_value(val)
        ),
    ))
}

pub fn handle_get_engine(
    ctx: &Context,
    kind: SubsystemKind,
    target: f64,
    characteristic: &str,
) -> Result<SystemResponse, HandlerError> {
    let chara = ctx.characteristic_label(characteristic);
    let items = candidates(ctx, "get_engine", kind, &chara)?;
    let gaps: Vec<(i64, (f64, f64))> = items.iter().map(|&(id, v)| (id, ((v - target).abs(), v))).collect();
    let (id, (_, val)) = pick(&gaps, |a, b| a.0 < b.0).ok_or(HandlerError::NoData)?;
    Ok(SystemResponse::answer(
        id,
        Some(kind.to_string()),
        format!("{kind} of engine {id} is operating at {chara} {}", format_value(val)),
    ))
}

/// Normalized distance of each candidate's operating point to the boundary.
pub fn closest_distances(ctx: &Context, kind: SubsystemKind, state: State) -> Result<Vec<(i64, f64)>, HandlerError> {
    let rows = ctx.query("closest", &[("SUBSYSTEM", Term::text(kind.as_str()))])?;
    let mut out = Vec::new();
    for row in &rows {
        let (Some(id), Some(mf), Some(pr)) = (row_id(row), row_f64(row, "mf"), row_f64(row, "pr")) else { continue };
        let sub = ctx.fleet.engine(id).and_then(|e| e.subsystems.get(&kind)).ok_or(HandlerError::NoData)?;
        let boundary = match state {
            State::Stall => sub.map.stall_line.as_ref(),
            State::Choke => sub.map.choke_line.as_ref(),
        }
        .ok_or(HandlerError::NoBoundary(state))?;
        out.push((id, normalized_boundary_distance(&sub.map, [mf, pr], boundary)));
    }
    out.sort_by_key(|a| a.0);
    Ok(out)
}

pub fn handle_closest(ctx: &Context, kind: SubsystemKind, state: State) -> Result<SystemResponse, HandlerError> {
    let items = closest_distances(ctx, kind, state)?;
    let (id, d) = pick(&items, |a, b| a < b).ok_or(HandlerError::NoData)?;
    Ok(SystemResponse::answer(
        id,
        Some(kind.to_string()),
        format!("{kind} of engine {id} is closest to {}. Margin is {}", state.as_str(), format_value(d)),
    ))
}

pub fn handle_aggregate(
    ctx: &Context,
    engine: &Iri,
    kind: SubsystemKind,
    characteristic: &str,
    hours: f64,
) -> Result<SystemResponse, HandlerError> {
    let rec = ctx.engine(engine)?;
    let rows =
        ctx.query("aggregate_value", &[("SUBSYSTEM", Term::text(kind.as_str())), ("ENGINE_NAME", engine_name(rec))])?;
    if !rows.iter().any(|r| row_id(r) == Some(rec.vr_id)) {
        return Err(HandlerError::UnknownSubsystem);
    }
    let sub = rec.subsystems.get(&kind).ok_or(HandlerError::UnknownSubsystem)?;
    if !sub.history.iter().any(|(_, v)| v.contains_key(characteristic)) {
        return Err(HandlerError::UnknownCharacteristic);
    }
    let samples: Vec<f64> =
        sub.history.iter().filter(|(h, _)| *h >= hours).filter_map(|(_, v)| v.get(characteristic).copied()).collect();
    if samples.is_empty() {
        return Err(HandlerError::NoSamples);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let chara = ctx.characteristic_label(characteristic);
    Ok(SystemResponse::answer(
        rec.vr_id,
        Some(kind.to_string()),
        format!(
            "Average {chara} of {kind} of engine {} after {} hours is {}",
            rec.vr_id,
            trimmed_number(hours),
            format_value(mean)
        ),
    ))
}

/// Mean current efficiency over each engine's subsystems, per engine of the fleet.
pub fn fleet_efficiencies(ctx: &Context, fleet_name: &str) -> Result<Vec<(i64, f64)>, HandlerError> {
    if !ctx.fleet.engines().any(|e| e.fleet == fleet_name) {
        return Err(HandlerError::UnknownFleet);
    }
    let rows = ctx.query("fleet_best", &[("FLEET_NAME", Term::text(fleet_name))])?;
    let mut sums: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for row in &rows {
        if let (Some(id), Some(v)) = (row_id(row), row_f64(row, "val")) {
            let e = sums.entry(id).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    Ok(sums.into_iter().map(|(id, (s, n))| (id, s / n as f64)).collect())
}

pub fn handle_fleet_best(ctx: &Context, fleet_name: &str) -> Result<SystemResponse, HandlerError> {
    let items = fleet_efficiencies(ctx, fleet_name)?;
    let (id, mean) = pick(&items, |a, b| a > b).ok_or(HandlerError::NoData)?;
    let rec = ctx.fleet.engine(id).ok_or(HandlerError::NoData)?;
    let chara = ctx.characteristic_label("Efficiency");
    Ok(SystemResponse::answer(
        id,
        None,
        format!(
            "Engine {id} has the highest average {chara} in fleet {fleet_name}, equal to {}. It is currently at latitude {}, longitude {}.",
            format_value(mean),
            format_value(rec.latitude),
            format_value(rec.longitude)
        ),
    ))
}

fn local_name(iri: &Iri) -> Option<&str> {
    iri.as_str().strip_prefix(AERO_NS)
}

fn slot<'c>(cmd: &'c ClearedCommand, name: &str) -> Result<&'c Term, HandlerError> {
    cmd.slot(name).ok_or_else(|| HandlerError::BadSlot(name.to_string()))
}

fn iri_slot<'c>(cmd: &'c ClearedCommand, name: &str) -> Result<&'c Iri, HandlerError> {
    slot(cmd, name)?.as_iri().ok_or_else(|| HandlerError::BadSlot(name.to_string()))
}

fn kind_slot(cmd: &ClearedCommand) -> Result<SubsystemKind, HandlerError> {
    local_name(iri_slot(cmd, "subsystem")?)
        .and_then(SubsystemKind::from_class_name)
        .ok_or_else(|| HandlerError::BadSlot("subsystem".into()))
}

fn characteristic_slot(cmd: &ClearedCommand, default: Option<&'static str>) -> Result<String, HandlerError> {
    match (cmd.slot("characteristic"), default) {
        (None, Some(d)) => Ok(d.to_string()),
        _ => local_name(iri_slot(cmd, "characteristic")?)
            .map(str::to_string)
            .ok_or_else(|| HandlerError::BadSlot("characteristic".into())),
    }
}

fn number_slot(cmd: &ClearedCommand, name: &str) -> Result<f64, HandlerError> {
    slot(cmd, name)?.as_f64().ok_or_else(|| HandlerError::BadSlot(name.to_string()))
}

fn text_slot<'c>(cmd: &'c ClearedCommand, name: &str) -> Result<&'c str, HandlerError> {
    slot(cmd, name)?.as_text().ok_or_else(|| HandlerError::BadSlot(name.to_string()))
}

/// Routes a cleared command to its handler.
pub fn answer(ctx: &Context, cmd: &ClearedCommand) -> Result<SystemResponse, HandlerError> {
    match cmd.intent.as_str() {
        "show_engine" => handle_show_engine(ctx, iri_slot(cmd, "engine_name")?),
        "get_value" => {
            handle_get_value(ctx, iri_slot(cmd, "engine_name")?, kind_slot(cmd)?, &characteristic_slot(cmd, None)?)
        }
        "the_best" => {
            let direction = match text_slot(cmd, "best_direction")? {
                "highest" => Direction::Highest,
                "lowest" => Direction::Lowest,
                _ => return Err(HandlerError::BadSlot("best_direction".into())),
            };
            handle_the_best(ctx, kind_slot(cmd)?, direction, &characteristic_slot(cmd, None)?)
        }
        "get_engine" => handle_get_engine(
            ctx,
            kind_slot(cmd)?,
            number_slot(cmd, "num_value")?,
            &characteristic_slot(cmd, Some("Speed"))?,
        ),
        "closest" => {
            let state = match text_slot(cmd, "subsystem_state")? {
                "stall" => State::Stall,
                "choke" => State::Choke,
                _ => return Err(HandlerError::BadSlot("subsystem_state".into())),
            };
            handle_closest(ctx, kind_slot(cmd)?, state)
        }
        "aggregate_value" => handle_aggregate(
            ctx,
            iri_slot(cmd, "engine_name")?,
            kind_slot(cmd)?,
            &characteristic_slot(cmd, None)?,
            number_slot(cmd, "hours")?,
        ),
        "fleet_best" => {
            let fleet = iri_slot(cmd, "fleet_name")?;
            let name = ctx
                .graph
                .match_pattern(&Pattern::new(Some(fleet.clone()), Some(label()), None))
                .map_err(SparqlError::from)?
                .into_iter()
                .find_map(|t| t.object.as_text().map(str::to_string))
                .ok_or(HandlerError::UnknownFleet)?;
            handle_fleet_best(ctx, &name)
        }
        other => Err(HandlerError::Unsupported(other.to_string())),
    }
}
