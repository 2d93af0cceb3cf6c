//! Planar distances on compressor maps.

use super::model::{CompressorMap, Point};

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
    (p[0] - cx).hypot(p[1] - cy)
}

/// Minimum distance from `p` to any segment of `line`.
pub fn point_polyline_distance(p: Point, line: &[Point]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => (p[0] - only[0]).hypot(p[1] - only[1]),
        _ => line.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Per-axis extent of all map geometry; degenerate axes count as 1.
pub fn axis_ranges(map: &CompressorMap) -> [f64; 2] {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in map.points() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut out = [1.0; 2];
    for k in 0..2 {
        let r = hi[k] - lo[k];
        if r.is_finite() && r > 0.0 {
            out[k] = r;
        }
    }
    out
}

/// Distance from an operating point to a boundary after dividing each
/// axis by the map's range, so mass flow and pressure ratio weigh alike.
pub fn normalized_boundary_distance(map: &CompressorMap, point: Point, boundary: &[Point]) -> f64 {
    let r = axis_ranges(map);
    let scale = |q: &Point| [q[0] / r[0], q[1] / r[1]];
    let line: Vec<Point> = boundary.iter().map(scale).collect();
    point_polyline_distance(scale(&point), &line)
}
