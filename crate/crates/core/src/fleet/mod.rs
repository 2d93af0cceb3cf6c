//! Fleet model, answer handlers and update methods.

pub mod expr;
pub mod geometry;
mod handlers;
mod model;
mod response;
pub mod sync;
mod updates;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

pub use expr::{eval_expression, parse_expression, EvalError, Expr, ExprError};
pub use handlers::{
    answer, closest_distances, fleet_efficiencies, handle_aggregate, handle_closest, handle_fleet_best,
    handle_get_engine, handle_get_value, handle_show_engine, handle_the_best, Context, Direction, HandlerError, State,
};
pub use model::{
    is_characteristic_name, validate_engine, CompressorMap, EfficiencyContour, EngineRecord, FleetFile, Point,
    SpeedLine, SubsystemKind, SubsystemRecord, Values,
};
pub use response::{apology, format_value, Apology, SystemResponse};
pub use updates::{apply_updates, Applied, MethodRegistry, MethodSpec, UpdateMethod};

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum FleetError {
    #[error("unknown engine {0}")]
    UnknownEngine(String),
    #[error("unknown subsystem {0:?}")]
    UnknownSubsystem(String),
    #[error("unknown characteristic {0:?}")]
    UnknownCharacteristic(String),
    #[error("engine id {0} already exists")]
    DuplicateEngineId(i64),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("dependency cycle: {}", .0.join(" -> "))]
    DependencyCycle(Vec<String>),
    #[error("evaluating {target}: {reason}")]
    Eval { target: String, reason: String },
    #[error("flight hours {given} precede the last history entry at {last}")]
    HistoryOrder { last: f64, given: f64 },
}

/// Short spellings accepted for the standard characteristics.
pub const CHARACTERISTIC_ALIASES: [(&str, &str); 3] =
    [("MF", "MassFlow"), ("PR", "PressureRatio"), ("EFF", "Efficiency")];

/// Engines keyed by `vr_id` plus the registered update methods.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fleet {
    engines: BTreeMap<i64, EngineRecord>,
    methods: MethodRegistry,
}

impl Fleet {
    pub fn from_file(file: FleetFile) -> Result<Self, FleetError> {
        let mut fleet = Fleet::default();
        for e in file.engines {
            fleet.add_engine(e)?;
        }
        Ok(fleet)
    }

    pub fn to_file(&self) -> FleetFile {
        FleetFile { note: None, engines: self.engines.values().cloned().collect() }
    }

    pub fn engines(&self) -> impl Iterator<Item = &EngineRecord> {
        self.engines.values()
    }

    pub fn len(&self) -> usize {
        self.engines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.engines.is_empty()
    }

    pub fn engine(&self, vr_id: i64) -> Option<&EngineRecord> {
        self.engines.get(&vr_id)
    }

    pub fn methods(&self) -> &MethodRegistry {
        &self.methods
    }

    pub fn add_engine(&mut self, engine: EngineRecord) -> Result<(), FleetError> {
        validate_engine(&engine)?;
        if self.engines.contains_key(&engine.vr_id) {
            return Err(FleetError::DuplicateEngineId(engine.vr_id));
        }
        self.engines.insert(engine.vr_id, engine);
        Ok(())
    }

    /// Characteristic names present on any subsystem or produced by a method.
    pub fn known_characteristics(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = crate::kg::vocab::CHARACTERISTICS.iter().map(|s| s.to_string()).collect();
        for e in self.engines.values() {
            for s in e.subsystems.values() {
                out.extend(s.characteristics.keys().cloned());
            }
        }
        out.extend(self.methods.iter().map(|m| m.target.clone()));
        out
    }

    /// Exact name, then alias, then case-insensitive match among known names.
    pub fn resolve_characteristic(&self, name: &str) -> Option<String> {
        let known = self.known_characteristics();
        if known.contains(name) {
            return Some(name.to_string());
        }
        if let Some((_, full)) = CHARACTERISTIC_ALIASES.iter().find(|(a, _)| a.eq_ignore_ascii_case(name)) {
            return Some(full.to_string());
        }
        known.into_iter().find(|k| k.eq_ignore_ascii_case(name))
    }

    /// Registers a method. Arguments must name known characteristics; the
    /// target may be new.
    pub fn register_method(&mut self, spec: &MethodSpec) -> Result<UpdateMethod, FleetError> {
        let target = match self.resolve_characteristic(&spec.characteristic) {
            Some(t) => t,
            None if is_characteristic_name(&spec.characteristic) => spec.characteristic.clone(),
            None => return Err(FleetError::UnknownCharacteristic(spec.characteristic.clone())),
        };
        let args = spec
            .func_args
            .iter()
            .map(|a| self.resolve_characteristic(a).ok_or_else(|| FleetError::UnknownCharacteristic(a.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let method = UpdateMethod::new(target, args, &spec.func_args, spec.func_expr.clone())?;
        self.methods.register(method.clone())?;
        Ok(method)
    }

    /// Applies an update to one subsystem; all-or-nothing.
    pub fn apply_updates(
        &mut self,
        vr_id: i64,
        kind: SubsystemKind,
        new_values: &Values,
        flight_hours: Option<f64>,
    ) -> Result<Applied, FleetError> {
        let engine = self.engines.get(&vr_id).ok_or_else(|| FleetError::UnknownEngine(vr_id.to_string()))?;
        let sub = engine.subsystems.get(&kind).ok_or_else(|| FleetError::UnknownSubsystem(kind.to_string()))?;
        let mut resolved = Values::new();
        for (name, v) in new_values {
            let full = match self.resolve_characteristic(name) {
                Some(n) => n,
                None if is_characteristic_name(name) => name.clone(),
                None => return Err(FleetError::UnknownCharacteristic(name.clone())),
            };
            resolved.insert(full, *v);
        }
        let applied = apply_updates(&self.methods, kind, sub, &resolved, flight_hours)?;
        let engine = self.engines.get_mut(&vr_id).expect("checked above");
        engine.subsystems.insert(kind, applied.record.clone());
        Ok(applied)
    }
}
