//! Exact planar predicates on top of adaptive-precision orientation.

use robust::{orient2d, Coord};

pub type Point = [f64; 2];

fn c(p: Point) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Sign of the turn `a → b → c`: positive counter-clockwise, zero collinear.
pub fn orient(a: Point, b: Point, p: Point) -> f64 {
    orient2d(c(a), c(b), c(p))
}

fn within_box(p: Point, a: Point, b: Point) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0.0 && within_box(p, a, b)
}

/// Closed segments `[p1, p2]` and `[q1, q2]` share at least one point.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(p1, q1, q2))
        || (d2 == 0.0 && within_box(p2, q1, q2))
        || (d3 == 0.0 && within_box(q1, p1, p2))
        || (d4 == 0.0 && within_box(q2, p1, p2))
}

fn edges(poly: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    poly.iter()
        .copied()
        .zip(poly.iter().copied().cycle().skip(1))
}

/// Point in the closed polygon (boundary included), even-odd rule.
pub fn in_polygon(p: Point, poly: &[Point]) -> bool {
    if edges(poly).any(|(a, b)| on_segment(p, a, b)) {
        return true;
    }
    let mut inside = false;
    for (a, b) in edges(poly) {
        if (a[1] > p[1]) != (b[1] > p[1]) {
            // crossing to the right of p, decided by orientation
            let o = orient(a, b, p);
            if (b[1] > a[1]) == (o > 0.0) {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - (a[0] + t * dx)).hypot(p[1] - (a[1] + t * dy))
}

/// Distance to the closed polygon; 0 inside.
pub fn polygon_distance(p: Point, poly: &[Point]) -> f64 {
    if in_polygon(p, poly) {
        return 0.0;
    }
    edges(poly)
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// The closed segment `[p, q]` meets the closed polygon.
pub fn segment_hits_polygon(p: Point, q: Point, poly: &[Point]) -> bool {
    in_polygon(p, poly)
        || in_polygon(q, poly)
        || edges(poly).any(|(a, b)| segments_intersect(p, q, a, b))
}
