//! Convex polygons, the cone partition of their exterior and the singular rays.
//!
//! Vertices are stored counter-clockwise and indexed from 0. A point `z`
//! outside the polygon belongs to cone `k` when
//! `z - v_k = s (v_{k-1} - v_k) + t (v_k - v_{k+1})` with `s, t > 0`; the
//! supporting line through `z` then touches `v_k` with the interior on its
//! left when travelling from `z` toward `v_k`. Cone `k` is bounded by the
//! singular ray of `v_k` (direction `v_k - v_{k+1}`) and the singular ray of
//! `v_{k-1}`. Labels printed for humans are 1-based.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convex::{cross, perp, HalfPlane};
use crate::error::{Error, Result};
use crate::Point;

/// Relative tolerance for the singular-set test, scaled by `max(1, ‖P‖)`.
pub const SINGULAR_REL_TOL: f64 = 1e-12;
/// Default angle tolerance (radians) for parallel-line detection.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;

/// Where a point sits relative to the cone partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeLocation {
    /// Inside the open cone with apex `v_k` (0-based).
    Cone(usize),
    OnSingularSet,
    InsidePolygon,
}

/// Half-line `origin + t · direction`, `t >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularRay {
    pub origin: Point,
    pub direction: Point,
}

impl SingularRay {
    pub fn distance(&self, z: Point) -> f64 {
        let w = z - self.origin;
        let t = w.dot(&self.direction);
        if t <= 0.0 {
            w.norm()
        } else {
            cross(self.direction, w).abs()
        }
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + self.direction * t
    }
}

/// Line through side `j` (from `v_j` to `v_{j+1}`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportLine {
    pub index: usize,
    pub base: Point,
    pub tangent: Point,
    /// Tangent rotated by +90°; points into the polygon.
    pub normal: Point,
}

/// Strictly convex polygon with counter-clockwise vertices. Serialized as
/// its vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Point>", try_from = "Vec<Point>")]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    cones: Vec<[HalfPlane; 2]>,
    rays: Vec<SingularRay>,
    norm: f64,
}

/// Largest vertex count representable in an itinerary.
pub const MAX_VERTICES: usize = 256;

impl From<ConvexPolygon> for Vec<Point> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

impl TryFrom<Vec<Point>> for ConvexPolygon {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Self::new(points)
    }
}

/// Result of the general-position test. Offending entries are pairs of
/// vertex-index pairs whose connecting lines are parallel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralPosition {
    pub in_general_position: bool,
    pub parallel_pairs: Vec<((usize, usize), (usize, usize))>,
}

impl ConvexPolygon {
    /// Validates and builds a polygon. Clockwise input is reversed.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if n > MAX_VERTICES {
            return Err(Error::ParameterOutOfRange(format!(
                "at most {MAX_VERTICES} vertices are supported, got {n}"
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(Error::RepeatedVertex(j));
                }
            }
        }
        let mut vertices = points;
        if crate::convex::signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let mut turning = 0.0;
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let cur = vertices[i];
            let next = vertices[(i + 1) % n];
            let e1 = cur - prev;
            let e2 = next - cur;
            let c = cross(e1, e2);
            if c.abs() <= 1e-12 * e1.norm() * e2.norm() {
                return Err(Error::DegenerateCollinear((i + n - 1) % n, i, (i + 1) % n));
            }
            if c < 0.0 {
                return Err(Error::NotConvex(i));
            }
            turning += c.atan2(e1.dot(&e2));
        }
        // a star polygon turns left everywhere but winds more than once
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::NotConvex(0));
        }
        let norm = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut poly = Self {
            vertices,
            cones: Vec::new(),
            rays: Vec::new(),
            norm,
        };
        poly.rays = (0..n)
            .map(|k| {
                let d = poly.vertex(k) - poly.vertex(k + 1);
                SingularRay {
                    origin: poly.vertex(k),
                    direction: d / d.norm(),
                }
            })
            .collect();
        poly.cones = (0..n)
            .map(|k| {
                let v = poly.vertex(k);
                let a = poly.vertex(k + n - 1) - v;
                let b = v - poly.vertex(k + 1);
                [HalfPlane::through(v, perp(b)), HalfPlane::through(v, -perp(a))]
            })
            .collect();
        Ok(poly)
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    /// Regular polygon with `d` vertices on the circle of `radius`, first vertex on the +x axis.
    pub fn regular(d: usize, radius: f64) -> Result<Self> {
        Self::new(crate::convex::regular_polygon(radius, d))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertex with cyclic indexing.
    #[inline]
    pub fn vertex(&self, k: usize) -> Point {
        self.vertices[k % self.vertices.len()]
    }

    /// `‖P‖`: the largest vertex modulus.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Absolute tolerance of the singular-set test.
    pub fn tolerance(&self) -> f64 {
        SINGULAR_REL_TOL * self.norm.max(1.0)
    }

    pub fn area(&self) -> f64 {
        crate::convex::signed_area(&self.vertices)
    }

    /// The two half-planes whose intersection is cone `k`.
    pub fn cone_halfplanes(&self, k: usize) -> &[HalfPlane; 2] {
        &self.cones[k]
    }

    pub fn singular_rays(&self) -> &[SingularRay] {
        &self.rays
    }

    pub fn support_line(&self, j: usize) -> SupportLine {
        let base = self.vertex(j);
        let e = self.vertex(j + 1) - base;
        let tangent = e / e.norm();
        SupportLine {
            index: j % self.len(),
            base,
            tangent,
            normal: perp(tangent),
        }
    }

    /// `(s, t)` coordinates of `z` in the frame of cone `k`.
    pub fn cone_coordinates(&self, k: usize, z: Point) -> (f64, f64) {
        let v = self.vertex(k);
        let a = self.vertex(k + self.len() - 1) - v;
        let b = v - self.vertex(k + 1);
        let w = z - v;
        let det = cross(a, b);
        (cross(w, b) / det, cross(a, w) / det)
    }

    pub fn contains(&self, z: Point) -> bool {
        crate::convex::inside_margin(&self.vertices, z) >= -self.tolerance()
    }

    pub fn distance_to_singular_set(&self, z: Point) -> f64 {
        self.rays
            .iter()
            .map(|r| r.distance(z))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn cone_index(&self, z: Point) -> ConeLocation {
        if self.contains(z) {
            return ConeLocation::InsidePolygon;
        }
        if self.distance_to_singular_set(z) <= self.tolerance() {
            return ConeLocation::OnSingularSet;
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..self.len() {
            let (s, t) = self.cone_coordinates(k, z);
            if s > 0.0 && t > 0.0 {
                return ConeLocation::Cone(k);
            }
            let score = s.min(t);
            if score > best.0 {
                best = (score, k);
            }
        }
        // unreachable for exterior points away from the rays, up to rounding
        ConeLocation::Cone(best.1)
    }

    /// Checks that no two distinct lines through vertex pairs are parallel.
    pub fn general_position(&self, angle_tol: f64) -> GeneralPosition {
        let n = self.len();
        let mut lines = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                let d = self.vertices[b] - self.vertices[a];
                lines.push(((a, b), d / d.norm()));
            }
        }
        let mut parallel_pairs = Vec::new();
        for (i, &(pi, di)) in lines.iter().enumerate() {
            for &(pj, dj) in &lines[i + 1..] {
                let angle = cross(di, dj).atan2(di.dot(&dj)).abs();
                let angle = angle.min(PI - angle);
                if angle <= angle_tol {
                    parallel_pairs.push((pi, pj));
                }
            }
        }
        GeneralPosition {
            in_general_position: parallel_pairs.is_empty(),
            parallel_pairs,
        }
    }

    /// Applies a similarity `z ↦ scale · R(angle) z + shift` to every vertex.
    pub fn transformed(&self, scale: f64, angle: f64, shift: Point) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(
            self.vertices
                .iter()
                .map(|v| Point::new(c * v.x - s * v.y, s * v.x + c * v.y) * scale + shift)
                .collect(),
        )
    }
}

/// Polygon text format: one `x y` pair per line, `#` starts a comment line.
impl FromStr for ConvexPolygon {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|f| !f.is_empty());
            let mut coord = |name: &str| -> Result<f64> {
                fields
                    .next()
                    .ok_or_else(|| Error::parse(i + 1, format!("missing {name} coordinate")))?
                    .parse::<f64>()
                    .map_err(|e| Error::parse(i + 1, e.to_string()))
            };
            let x = coord("x")?;
            let y = coord("y")?;
            if fields.next().is_some() {
                return Err(Error::parse(i + 1, "expected two numbers"));
            }
            points.push(Point::new(x, y));
        }
        ConvexPolygon::new(points)
    }
}
