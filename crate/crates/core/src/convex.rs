//! Convex-polygon kernel: half-plane clipping, areas, segment clipping.
//!
//! Polygons are plain vertex slices in counter-clockwise order. Everything
//! here is exact-sign Sutherland-Hodgman; tolerance decisions (slivers,
//! thin pieces) belong to the callers.

use crate::Point;

/// z-component of the cross product of two planar vectors.
#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Rotation by +90°.
#[inline]
pub fn perp(a: Point) -> Point {
    Point::new(-a.y, a.x)
}

/// Closed half-plane `normal · z <= offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// Half-plane through `point` whose outward normal is `normal` (normalized here).
    pub fn through(point: Point, normal: Point) -> Self {
        let normal = normal / normal.norm();
        Self {
            normal,
            offset: normal.dot(&point),
        }
    }

    /// Signed distance, negative inside.
    #[inline]
    pub fn signed_distance(&self, z: Point) -> f64 {
        self.normal.dot(&z) - self.offset
    }
}

/// Signed area (positive for counter-clockwise order).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let origin = poly[0];
    let mut acc = 0.0;
    for i in 1..n - 1 {
        acc += cross(poly[i] - origin, poly[i + 1] - origin);
    }
    0.5 * acc
}

pub fn perimeter(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| (poly[(i + 1) % n] - poly[i]).norm()).sum()
}

/// Width proxy `2 · area / perimeter`; equals the width for thin rectangles.
pub fn thickness(poly: &[Point]) -> f64 {
    let p = perimeter(poly);
    if p == 0.0 {
        0.0
    } else {
        2.0 * signed_area(poly).abs() / p
    }
}

pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let area = signed_area(poly);
    if n < 3 || area.abs() < f64::MIN_POSITIVE {
        let sum = poly.iter().fold(Point::zeros(), |acc, p| acc + p);
        return sum / n.max(1) as f64;
    }
    let origin = poly[0];
    let mut c = Point::zeros();
    for i in 1..n - 1 {
        let a = poly[i] - origin;
        let b = poly[i + 1] - origin;
        let w = cross(a, b);
        c += (a + b) * w;
    }
    origin + c / (6.0 * area)
}

/// Sutherland-Hodgman clip against one half-plane, writing into `out`.
pub fn clip_into(poly: &[Point], hp: &HalfPlane, out: &mut Vec<Point>) {
    out.clear();
    let n = poly.len();
    if n == 0 {
        return;
    }
    let mut prev = poly[n - 1];
    let mut prev_d = hp.signed_distance(prev);
    for &cur in poly {
        let d = hp.signed_distance(cur);
        if d <= 0.0 {
            if prev_d > 0.0 {
                out.push(intersect(prev, prev_d, cur, d));
            }
            out.push(cur);
        } else if prev_d <= 0.0 {
            out.push(intersect(prev, prev_d, cur, d));
        }
        prev = cur;
        prev_d = d;
    }
    dedup_ring(out);
}

pub fn clip(poly: &[Point], hp: &HalfPlane) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    clip_into(poly, hp, &mut out);
    out
}

#[inline]
fn intersect(a: Point, da: f64, b: Point, db: f64) -> Point {
    let t = da / (da - db);
    a + (b - a) * t
}

fn dedup_ring(ring: &mut Vec<Point>) {
    ring.dedup_by(|a, b| a == b);
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
}

/// Regular `sides`-gon inscribed in the circle of `radius` about the origin.
pub fn regular_polygon(radius: f64, sides: usize) -> Vec<Point> {
    (0..sides)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
            Point::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect()
}

/// Signed distance of `z` to the inside of a counter-clockwise convex polygon:
/// the minimum over edges of the left-side distance. Positive strictly inside.
pub fn inside_margin(poly: &[Point], z: Point) -> f64 {
    let n = poly.len();
    let mut margin = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let e = poly[(i + 1) % n] - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        margin = margin.min(cross(e, z - a) / len);
    }
    margin
}

/// Parameter range `[t0, t1]` of the segment `a + t (b - a)`, `t ∈ [0, 1]`,
/// inside a counter-clockwise convex polygon (Cyrus-Beck).
pub fn clip_segment(poly: &[Point], a: Point, b: Point) -> Option<(f64, f64)> {
    let dir = b - a;
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let e = poly[(i + 1) % n] - p;
        // inside means cross(e, z - p) >= 0
        let num = cross(e, a - p);
        let den = cross(e, dir);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Distance from `z` to the segment `[a, b]`.
pub fn distance_to_segment(z: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}
