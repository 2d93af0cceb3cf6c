//! Update methods: derived characteristics recomputed from others.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::expr::{eval_expression, parse_expression, Expr};
use super::model::{SubsystemKind, SubsystemRecord, Values};
use super::FleetError;

/// Wire form of a method, as accepted by `add_update_method`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MethodSpec {
    pub characteristic: String,
    pub func_args: Vec<String>,
    pub func_expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpdateMethod {
    pub target: String,
    /// Resolved characteristic names, in declaration order.
    pub func_args: Vec<String>,
    /// Expression text as submitted.
    pub func_expr: String,
    #[serde(skip)]
    pub body: Expr,
}

impl UpdateMethod {
    /// `target` and `func_args` must already be resolved; `arg_names` are the
    /// spellings the expression uses for them.
    pub fn new(
        target: String,
        func_args: Vec<String>,
        arg_names: &[String],
        func_expr: String,
    ) -> Result<Self, FleetError> {
        let body = parse_expression(&func_expr, arg_names)?;
        Ok(UpdateMethod { target, func_args, func_expr, body })
    }

    pub fn evaluate(&self, kind: SubsystemKind, values: &Values) -> Option<Result<f64, FleetError>> {
        let args: Option<Vec<f64>> = self.func_args.iter().map(|a| values.get(a).copied()).collect();
        let args = args?;
        Some(
            eval_expression(&self.body, kind, &args)
                .map_err(|e| FleetError::Eval { target: self.target.clone(), reason: e.0 }),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MethodRegistry {
    methods: BTreeMap<String, UpdateMethod>,
}

impl MethodRegistry {
    pub fn get(&self, target: &str) -> Option<&UpdateMethod> {
        self.methods.get(target)
    }

    pub fn iter(&self) -> impl Iterator<Item = &UpdateMethod> {
        self.methods.values()
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    /// Stores `method`, replacing any earlier one for the same target,
    /// unless that would close a dependency cycle.
    pub fn register(&mut self, method: UpdateMethod) -> Result<(), FleetError> {
        let mut next = self.clone();
        let target = method.target.clone();
        next.methods.insert(target.clone(), method);
        if let Some(cycle) = next.cycle_through(&target) {
            return Err(FleetError::DependencyCycle(cycle));
        }
        *self = next;
        Ok(())
    }

    /// A path `target -> ... -> target` along argument edges, if any.
    fn cycle_through(&self, target: &str) -> Option<Vec<String>> {
        fn walk<'a>(
            reg: &'a MethodRegistry,
            node: &'a str,
            goal: &str,
            path: &mut Vec<&'a str>,
            seen: &mut BTreeSet<&'a str>,
        ) -> bool {
            let Some(m) = reg.methods.get(node) else { return false };
            for arg in &m.func_args {
                if arg == goal {
                    path.push(arg);
                    return true;
                }
                if seen.insert(arg) {
                    path.push(arg);
                    if walk(reg, arg, goal, path, seen) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        let mut path = vec![target];
        let mut seen = BTreeSet::new();
        walk(self, target, target, &mut path, &mut seen).then(|| path.into_iter().map(String::from).collect())
    }

    /// Targets ordered so every method comes after the methods producing
    /// its arguments; ties go by name.
    pub fn topological_order(&self) -> Vec<&str> {
        let mut indegree: BTreeMap<&str, usize> = BTreeMap::new();
        for (t, m) in &self.methods {
            let deps = m.func_args.iter().filter(|a| self.methods.contains_key(*a)).count();
            indegree.insert(t, deps);
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(t, _)| *t).collect();
        let mut out = Vec::new();
        while let Some(t) = ready.pop_first() {
            out.push(t);
            for (other, m) in &self.methods {
                if m.func_args.iter().any(|a| a == t) {
                    let d = indegree.get_mut(other.as_str()).expect("every target has an entry");
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(other);
                    }
                }
            }
        }
        out
    }
}

/// Result of applying an update to one subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct Applied {
    pub record: SubsystemRecord,
    /// Characteristics whose value is new or differs from before.
    pub changed: Values,
}

/// Writes `new_values`, recomputes dependent characteristics and records a
/// history entry. Works on a copy, so an error leaves `sub` untouched.
///
/// Explicitly supplied values are never overwritten by a method. Methods
/// whose arguments the subsystem lacks are skipped.
pub fn apply_updates(
    methods: &MethodRegistry,
    kind: SubsystemKind,
    sub: &SubsystemRecord,
    new_values: &Values,
    flight_hours: Option<f64>,
) -> Result<Applied, FleetError> {
    for (name, v) in new_values {
        if !v.is_finite() {
            return Err(FleetError::Schema(format!("values.{name}: must be a finite number")));
        }
    }
    if let Some(h) = flight_hours {
        if !h.is_finite() || h < 0.0 {
            return Err(FleetError::Schema("flight_hours: must be a non-negative finite number".into()));
        }
    }
    let mut values = sub.characteristics.clone();
    values.extend(new_values.iter().map(|(k, v)| (k.clone(), *v)));

    let mut dirty: BTreeSet<&str> = new_values.keys().map(String::as_str).collect();
    for target in methods.topological_order() {
        let m = methods.get(target).expect("ordered targets are registered");
        if new_values.contains_key(target) || !m.func_args.iter().any(|a| dirty.contains(a.as_str())) {
            continue;
        }
        if let Some(v) = m.evaluate(kind, &values) {
            values.insert(target.to_string(), v?);
            dirty.insert(target);
        }
    }

    let changed: Values =
        values.iter().filter(|(k, v)| sub.characteristics.get(*k) != Some(*v)).map(|(k, v)| (k.clone(), *v)).collect();

    let mut record = sub.clone();
    record.characteristics = values.clone();
    let last = record.history.last().map(|(h, _)| *h);
    match (flight_hours, last) {
        (None, None) => record.history.push((0.0, values)),
        (None, Some(_)) => record.history.last_mut().expect("non-empty").1 = values,
        (Some(h), None) => record.history.push((h, values)),
        (Some(h), Some(l)) if h > l => record.history.push((h, values)),
        (Some(h), Some(l)) if h == l => record.history.last_mut().expect("non-empty").1 = values,
        (Some(h), Some(l)) => return Err(FleetError::HistoryOrder { last: l, given: h }),
    }
    Ok(Applied { record, changed })
}
