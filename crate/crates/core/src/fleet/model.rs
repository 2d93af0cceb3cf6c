//! Fleet state as loaded from the fleet data file.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FleetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubsystemKind {
    #[serde(rename = "fan")]
    Fan,
    #[serde(rename = "LPC")]
    Lpc,
    #[serde(rename = "IPC")]
    Ipc,
    #[serde(rename = "HPC")]
    Hpc,
}

impl SubsystemKind {
    pub const ALL: [SubsystemKind; 4] =
        [SubsystemKind::Fan, SubsystemKind::Lpc, SubsystemKind::Ipc, SubsystemKind::Hpc];

    /// Name used in the data file, in messages and as the class label.
    pub fn as_str(self) -> &'static str {
        match self {
            SubsystemKind::Fan => "fan",
            SubsystemKind::Lpc => "LPC",
            SubsystemKind::Ipc => "IPC",
            SubsystemKind::Hpc => "HPC",
        }
    }

    /// Local name of the class in the `aero:` namespace.
    pub fn class_name(self) -> &'static str {
        match self {
            SubsystemKind::Fan => "Fan",
            other => other.as_str(),
        }
    }

    pub fn from_class_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.class_name() == name)
    }
}

impl fmt::Display for SubsystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubsystemKind {
    type Err = FleetError;

    /// Exact kind names, ignoring case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| FleetError::UnknownSubsystem(s.to_string()))
    }
}

pub type Point = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedLine {
    pub speed: f64,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyContour {
    pub efficiency: f64,
    pub points: Vec<Point>,
}

/// Compressor characteristics plot: mass flow on x, pressure ratio on y.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompressorMap {
    #[serde(default)]
    pub speed_lines: Vec<SpeedLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_line: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choke_line: Option<Vec<Point>>,
    #[serde(default)]
    pub efficiency_contours: Vec<EfficiencyContour>,
}

impl CompressorMap {
    /// Every vertex of every polyline on the map.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.speed_lines
            .iter()
            .flat_map(|l| l.points.iter())
            .chain(self.stall_line.iter().flatten())
            .chain(self.choke_line.iter().flatten())
            .chain(self.efficiency_contours.iter().flat_map(|c| c.points.iter()))
    }
}

pub type Values = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsystemRecord {
    #[serde(default)]
    pub characteristics: Values,
    #[serde(default)]
    pub history: Vec<(f64, Values)>,
    #[serde(default)]
    pub map: CompressorMap,
}

impl SubsystemRecord {
    pub fn value(&self, characteristic: &str) -> Option<f64> {
        self.characteristics.get(characteristic).copied()
    }

    pub fn flight_hours(&self) -> Option<f64> {
        self.history.last().map(|(h, _)| *h)
    }

    /// `(MassFlow, PressureRatio)`.
    pub fn operating_point(&self) -> Option<Point> {
        Some([self.value("MassFlow")?, self.value("PressureRatio")?])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineRecord {
    pub vr_id: i64,
    pub label: String,
    pub fleet: String,
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub subsystems: BTreeMap<SubsystemKind, SubsystemRecord>,
}

/// Top level of the fleet data file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FleetFile {
    #[serde(rename = "_note", default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub engines: Vec<EngineRecord>,
}

impl FleetFile {
    pub fn from_json(text: &str) -> Result<Self, FleetError> {
        let file: FleetFile = serde_json::from_str(text).map_err(|e| FleetError::Schema(e.to_string()))?;
        let mut seen = std::collections::BTreeSet::new();
        for e in &file.engines {
            validate_engine(e)?;
            if !seen.insert(e.vr_id) {
                return Err(FleetError::DuplicateEngineId(e.vr_id));
            }
        }
        Ok(file)
    }
}

/// Local names already taken by classes and structural properties.
const RESERVED: [&str; 19] = [
    "Engine",
    "Subsystem",
    "Compressor",
    "Fan",
    "LPC",
    "IPC",
    "HPC",
    "Plot",
    "Function",
    "Characteristic",
    "Fleet",
    "VR_ID",
    "FlightHours",
    "Latitude",
    "Longitude",
    "isPartOf",
    "isDepictedOn",
    "isSubclassOf",
    "computes",
];

/// Characteristic names double as predicate local names.
pub fn is_characteristic_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
        && !name.starts_with("Engine_")
        && !name.starts_with("Fleet_")
        && !name.starts_with("Function_")
        && !name.starts_with("Plot_")
}

fn schema(path: String, msg: impl fmt::Display) -> FleetError {
    FleetError::Schema(format!("{path}: {msg}"))
}

fn check_finite(path: impl Fn() -> String, v: f64) -> Result<(), FleetError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(schema(path(), "must be a finite number"))
    }
}

fn check_values(path: &str, values: &Values) -> Result<(), FleetError> {
    for (name, v) in values {
        if !is_characteristic_name(name) {
            return Err(schema(path.to_string(), format!("bad characteristic name {name:?}")));
        }
        check_finite(|| format!("{path}.{name}"), *v)?;
    }
    Ok(())
}

fn check_polyline(path: &str, points: &[Point]) -> Result<(), FleetError> {
    if points.len() < 2 {
        return Err(schema(path.to_string(), "polyline needs at least 2 points"));
    }
    for (i, p) in points.iter().enumerate() {
        check_finite(|| format!("{path}[{i}]"), p[0])?;
        check_finite(|| format!("{path}[{i}]"), p[1])?;
    }
    Ok(())
}

/// Checks the record invariants, naming the first offending field.
pub fn validate_engine(e: &EngineRecord) -> Result<(), FleetError> {
    let root = format!("engine {}", e.vr_id);
    if e.label.trim().is_empty() {
        return Err(schema(format!("{root}.label"), "must not be empty"));
    }
    if e.fleet.trim().is_empty() {
        return Err(schema(format!("{root}.fleet"), "must not be empty"));
    }
    if !(e.latitude.is_finite() && (-90.0..=90.0).contains(&e.latitude)) {
        return Err(schema(format!("{root}.latitude"), "must be within [-90, 90]"));
    }
    if !(e.longitude.is_finite() && (-180.0..=180.0).contains(&e.longitude)) {
        return Err(schema(format!("{root}.longitude"), "must be within [-180, 180]"));
    }
    for (kind, sub) in &e.subsystems {
        let path = format!("{root}.subsystems.{kind}");
        check_values(&format!("{path}.characteristics"), &sub.characteristics)?;
        let mut prev: Option<f64> = None;
        for (i, (hours, values)) in sub.history.iter().enumerate() {
            let hpath = format!("{path}.history[{i}]");
            check_finite(|| hpath.clone(), *hours)?;
            if prev.is_some_and(|p| *hours <= p) {
                return Err(schema(hpath, "flight hours must be strictly increasing"));
            }
            prev = Some(*hours);
            check_values(&hpath, values)?;
        }
        if let Some((_, last)) = sub.history.last() {
            if *last != sub.characteristics {
                return Err(schema(format!("{path}.characteristics"), "must equal the last history entry"));
            }
        }
        let map = &sub.map;
        for (i, line) in map.speed_lines.iter().enumerate() {
            let lpath = format!("{path}.map.speed_lines[{i}]");
            check_finite(|| lpath.clone(), line.speed)?;
            check_polyline(&lpath, &line.points)?;
            if line.points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                return Err(schema(lpath, "mass flow must be strictly increasing along a speed line"));
            }
        }
        if let Some(line) = &map.stall_line {
            check_polyline(&format!("{path}.map.stall_line"), line)?;
        }
        if let Some(line) = &map.choke_line {
            check_polyline(&format!("{path}.map.choke_line"), line)?;
        }
        for (i, c) in map.efficiency_contours.iter().enumerate() {
            let cpath = format!("{path}.map.efficiency_contours[{i}]");
            check_finite(|| cpath.clone(), c.efficiency)?;
            check_polyline(&cpath, &c.points)?;
        }
    }
    Ok(())
}
