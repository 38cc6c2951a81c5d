#![allow(dead_code)]

use obc_core::{ConvexPolygon, MapParams, Point};
use rand::Rng;

pub fn unit_square() -> ConvexPolygon {
    ConvexPolygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
}

pub fn centered_square() -> ConvexPolygon {
    ConvexPolygon::from_coords(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]).unwrap()
}

pub fn triangle() -> ConvexPolygon {
    ConvexPolygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.2, 0.9)]).unwrap()
}

pub fn heptagon() -> ConvexPolygon {
    ConvexPolygon::regular(7, 1.0).unwrap()
}

pub fn params(poly: ConvexPolygon, lambda: f64) -> MapParams {
    MapParams::new(poly, lambda).unwrap()
}

/// Random convex polygon: sorted angles on an ellipse, then a random shift.
pub fn random_polygon(rng: &mut impl Rng) -> ConvexPolygon {
    loop {
        let d = rng.gen_range(3..=8);
        let mut angles: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let (a, b) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let shift = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let pts = angles
            .iter()
            .map(|t| Point::new(a * t.cos(), b * t.sin()) + shift)
            .collect();
        if let Ok(p) = ConvexPolygon::new(pts) {
            // avoid nearly degenerate corners
            let n = p.len();
            let ok = (0..n).all(|i| {
                let e1 = p.vertex(i + 1) - p.vertex(i);
                let e2 = p.vertex(i + 2) - p.vertex(i + 1);
                e1.norm() > 0.05 && (e1.x * e2.y - e1.y * e2.x) > 1e-3 * e1.norm() * e2.norm()
            });
            if ok {
                return p;
            }
        }
    }
}

/// Uniform point in the disc of the given radius.
pub fn random_in_disc(rng: &mut impl Rng, r: f64) -> Point {
    loop {
        let z = Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z.norm() < r {
            return z;
        }
    }
}
