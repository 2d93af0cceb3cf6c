//! Shared fixtures: random fleets and independent oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

use jarvis_core::assets;
use jarvis_core::fleet::{CompressorMap, EngineRecord, FleetFile, SpeedLine, SubsystemKind, SubsystemRecord};
use jarvis_core::intent::IntentModel;
use jarvis_core::Jarvis;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn polyline(rng: &mut impl Rng, n: usize, x: (f64, f64), y: (f64, f64)) -> Vec<[f64; 2]> {
    (0..n).map(|_| [round4(rng.gen_range(x.0..x.1)), round4(rng.gen_range(y.0..y.1))]).collect()
}

/// A fleet of 1..=max engines with random ids, kinds, values and maps.
pub fn random_fleet(rng: &mut impl Rng, max: usize) -> FleetFile {
    let n = rng.gen_range(1..=max);
    let mut ids: Vec<i64> = (0..40).collect();
    ids.shuffle(rng);
    let mut engines = Vec::new();
    for &id in &ids[..n] {
        let mut subsystems = BTreeMap::new();
        for kind in SubsystemKind::ALL {
            if rng.gen_bool(0.2) && kind != SubsystemKind::Hpc {
                continue;
            }
            let (x, y) = ((0.2, 1.2), (1.0, 8.0));
            let mut values = BTreeMap::new();
            // Few distinct values so ties actually happen.
            values.insert("Efficiency".to_string(), (rng.gen_range(160..180) as f64) / 2.0);
            values.insert("Speed".to_string(), (rng.gen_range(140..210) as f64) / 2.0);
            values.insert("MassFlow".to_string(), round4(rng.gen_range(x.0..x.1)));
            values.insert("PressureRatio".to_string(), round4(rng.gen_range(y.0..y.1)));
            let mut history = Vec::new();
            let mut h = 0.0;
            for _ in 0..rng.gen_range(0..4) {
                h += rng.gen_range(1..50) as f64;
                let mut v = values.clone();
                v.insert("Speed".into(), (rng.gen_range(140..210) as f64) / 2.0);
                history.push((h, v));
            }
            if !history.is_empty() {
                h += rng.gen_range(1..50) as f64;
                history.push((h, values.clone()));
            }
            let (ns, nc) = (rng.gen_range(2..6), rng.gen_range(2..6));
            // Two speed lines spanning the plot fix the axis ranges, as on a real map.
            let map = CompressorMap {
                speed_lines: vec![
                    SpeedLine { speed: 80.0, points: vec![[x.0, y.0], [x.1, 0.5 * (y.0 + y.1)]] },
                    SpeedLine { speed: 100.0, points: vec![[x.0, 0.5 * (y.0 + y.1)], [x.1, y.1]] },
                ],
                stall_line: Some(polyline(rng, ns, x, y)),
                choke_line: Some(polyline(rng, nc, x, y)),
                efficiency_contours: vec![],
            };
            subsystems.insert(kind, SubsystemRecord { characteristics: values, history, map });
        }
        engines.push(EngineRecord {
            vr_id: id,
            label: id.to_string(),
            fleet: if rng.gen_bool(0.5) { "A".into() } else { "B".into() },
            latitude: round4(rng.gen_range(-90.0..90.0)),
            longitude: round4(rng.gen_range(-180.0..180.0)),
            subsystems,
        });
    }
    FleetFile { note: None, engines }
}

pub fn jarvis_for(file: FleetFile) -> Jarvis {
    Jarvis::new(file, IntentModel::from_training_text(assets::TRAINING).unwrap(), assets::templates()).unwrap()
}

pub fn demo_json() -> serde_json::Value {
    serde_json::from_str(assets::DEMO_FLEET).unwrap()
}

fn map_ranges(map: &CompressorMap) -> [f64; 2] {
    let mut all: Vec<[f64; 2]> = Vec::new();
    all.extend(map.speed_lines.iter().flat_map(|l| l.points.iter().copied()));
    all.extend(map.stall_line.iter().flatten().copied());
    all.extend(map.choke_line.iter().flatten().copied());
    all.extend(map.efficiency_contours.iter().flat_map(|c| c.points.iter().copied()));
    let mut range = [1.0; 2];
    for k in 0..2 {
        let lo = all.iter().map(|q| q[k]).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|q| q[k]).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            range[k] = hi - lo;
        }
    }
    range
}

pub const SAMPLES: usize = 10_000;

/// Smallest sampled distance over `t` in `[t0, t1]` of one segment, and the
/// parameter it occurred at.
fn sample_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2], range: [f64; 2], t0: f64, t1: f64) -> (f64, f64) {
    let mut best = (f64::INFINITY, t0);
    for i in 0..=SAMPLES {
        let t = t0 + (t1 - t0) * i as f64 / SAMPLES as f64;
        let q = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let d = ((p[0] - q[0]) / range[0]).hypot((p[1] - q[1]) / range[1]);
        if d < best.0 {
            best = (d, t);
        }
    }
    best
}

/// Dense-sampling distance from `p` to `line`, 10^4 samples per segment,
/// both scaled by the per-axis extent of every point on the map.
pub fn sampled_distance(map: &CompressorMap, p: [f64; 2], line: &[[f64; 2]]) -> f64 {
    let range = map_ranges(map);
    line.windows(2).map(|w| sample_segment(p, w[0], w[1], range, 0.0, 1.0).0).fold(f64::INFINITY, f64::min)
}

/// As [`sampled_distance`], then sampled again at 10^4 points between the
/// neighbours of each segment's best sample.
pub fn refined_sampled_distance(map: &CompressorMap, p: [f64; 2], line: &[[f64; 2]]) -> f64 {
    let range = map_ranges(map);
    let h = 1.0 / SAMPLES as f64;
    line.windows(2)
        .map(|w| {
            let (_, t) = sample_segment(p, w[0], w[1], range, 0.0, 1.0);
            sample_segment(p, w[0], w[1], range, (t - h).max(0.0), (t + h).min(1.0)).0
        })
        .fold(f64::INFINITY, f64::min)
}

/// Worst-case error of [`sampled_distance`]: half the largest normalized
/// gap between neighbouring samples.
pub fn sampling_error_bound(map: &CompressorMap, line: &[[f64; 2]]) -> f64 {
    let range = map_ranges(map);
    line.windows(2)
        .map(|w| ((w[1][0] - w[0][0]) / range[0]).hypot((w[1][1] - w[0][1]) / range[1]) / SAMPLES as f64 / 2.0)
        .fold(0.0, f64::max)
}

/// First index of the smallest key, scanning in vr_id order.
pub fn scan_min(items: &[(i64, f64)]) -> Option<(i64, f64)> {
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|x| x.0);
    let mut best: Option<(i64, f64)> = None;
    for (id, v) in sorted {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((id, v));
        }
    }
    best
}
