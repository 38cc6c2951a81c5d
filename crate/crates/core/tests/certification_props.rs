mod common;

use common::*;
use obc_core::certification::{
    certify, enumerate_attractors, min_singular_distance, periodic_point, AttractorLocator,
    BasinOutcome, CertificationStatus, DEFAULT_SAFETY,
};
use obc_core::symbolic::{Subdivision, SubdivisionConfig};
use obc_core::{ConeLocation, ConvexPolygon, Error, Itinerary, MapParams, OrbitStatus, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn parallelogram() -> ConvexPolygon {
    ConvexPolygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.3, 0.8), (0.3, 0.8)]).unwrap()
}

#[test]
fn covering_margin_is_monotone_once_positive() {
    for (poly, lambda) in [
        (unit_square(), 0.5),
        (triangle(), 0.8),
        (heptagon(), 0.6),
        (parallelogram(), 0.7),
    ] {
        let p = params(poly, lambda);
        let r = p.trap().r;
        let mut sub = Subdivision::new(&p, p.trap(), SubdivisionConfig::default());
        let mut holds_since = None;
        for n in 1..=40 {
            sub.advance().unwrap();
            let m = min_singular_distance(&p, sub.cells());
            let ok = m > 2.0 * r * lambda.powi(n);
            if let Some(n0) = holds_since {
                assert!(ok, "covering test held at {n0} but fails at {n}");
            } else if ok {
                holds_since = Some(n);
            }
        }
        assert!(holds_since.is_some());
    }
}

#[test]
fn attractors_are_valid_periodic_orbits() {
    for (poly, lambda) in [(unit_square(), 0.5), (triangle(), 0.6), (heptagon(), 0.7), (parallelogram(), 0.8)] {
        let p = params(poly, lambda);
        let res = certify(&p, 60, DEFAULT_SAFETY).unwrap();
        assert_eq!(res.status, CertificationStatus::Certified);
        assert!(!res.attractors.is_empty());
        for a in &res.attractors {
            let o = p.orbit(a.point, 200);
            assert_eq!(o.status, OrbitStatus::Completed);
            let expected: Vec<usize> = (0..200).map(|i| a.itinerary.symbols()[i % a.period] as usize).collect();
            assert_eq!(o.itinerary, Itinerary::new(expected));
            let drift = (0..=200)
                .step_by(a.period)
                .map(|i| (o.points[i] - a.point).norm())
                .fold(0.0, f64::max);
            assert!(drift < 1e-10, "drift {drift}");
            let scale = 1.0 - (-lambda).powi(a.period as i32);
            assert!((a.point * scale - p.h_point(&a.itinerary)).norm() <= 1e-12 * res.trap.r);
            for z in &a.orbit {
                assert!(p.polygon().distance_to_singular_set(*z) > 0.0);
            }
            assert_eq!(a.itinerary, a.itinerary.min_rotation().0);
            assert_eq!(a.itinerary.minimal_period(), a.period);
        }
    }
}

#[test]
fn symmetric_polygon_has_symmetric_attractors() {
    for (poly, lambda) in [(centered_square(), 0.6), (parallelogram(), 0.8), (heptagon(), 0.5)] {
        let p = params(poly.clone(), lambda);
        let res = certify(&p, 60, DEFAULT_SAFETY).unwrap();
        assert_eq!(res.status, CertificationStatus::Certified);
        let points: Vec<Point> = res.attractors.iter().flat_map(|a| a.orbit.clone()).collect();
        let center = poly.vertices().iter().sum::<Point>() / poly.len() as f64;
        let symmetric = poly
            .vertices()
            .iter()
            .all(|v| poly.vertices().iter().any(|w| (2.0 * center - v - w).norm() < 1e-12));
        if !symmetric {
            continue;
        }
        for z in &points {
            let mirror = 2.0 * center - z;
            assert!(points.iter().any(|w| (w - mirror).norm() < 1e-9), "no mirror for {z:?}");
        }
    }
}

/// λ in `[lo, hi]` where the fixed point of `block` stops being admissible.
fn admissibility_edge(poly: &ConvexPolygon, block: &Itinerary, mut lo: f64, mut hi: f64) -> f64 {
    let admissible = |l: f64| {
        let p = params(poly.clone(), l);
        let mut z = periodic_point(&p, block);
        block.iter().all(|k| {
            let ok = p.polygon().cone_index(z) == ConeLocation::Cone(k);
            z = p.branch(k, z);
            ok
        })
    };
    assert!(admissible(lo) && !admissible(hi));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn periodic_point_on_a_ray_is_inconclusive_at_every_depth() {
    // The 4-cycle (1,2,3,4) of this quadrilateral leaves its cones when λ
    // crosses a value near 0.545; at that value one orbit point sits on a ray.
    let quad = ConvexPolygon::from_coords(&[(0.0, 0.0), (2.0, 0.0), (1.2, 1.0), (0.1, 0.9)]).unwrap();
    let block = Itinerary::new(vec![0, 1, 2, 3]);
    let lambda = admissibility_edge(&quad, &block, 0.3, 0.8);
    let p = params(quad, lambda);
    let z = periodic_point(&p, &block);
    let orbit = p.orbit(z, 3);
    let closest = orbit
        .points
        .iter()
        .map(|w| p.polygon().distance_to_singular_set(*w))
        .fold(f64::INFINITY, f64::min);
    assert!(closest < 1e-10, "closest {closest}");
    let res = certify(&p, 40, DEFAULT_SAFETY).unwrap();
    assert_eq!(res.status, CertificationStatus::Inconclusive);
    for rec in &res.history {
        assert!(rec.min_distance <= DEFAULT_SAFETY * rec.covering_radius, "{rec:?}");
    }
}

#[test]
fn shallow_graph_is_rejected() {
    let p = params(heptagon(), 0.9);
    assert!(matches!(
        enumerate_attractors(&p, 5, p.polygon().tolerance()),
        Err(Error::NotStrictlyInside { .. })
    ));
}

#[test]
fn enumeration_matches_certificate() {
    let p = params(heptagon(), 0.7);
    let res = certify(&p, 60, DEFAULT_SAFETY).unwrap();
    let depth = res.attractor_depth.unwrap();
    let again = enumerate_attractors(&p, depth, p.polygon().tolerance()).unwrap();
    assert_eq!(again, res.attractors);
}

fn monte_carlo_unresolved(p: &MapParams, starts: usize, seed: u64) -> (usize, usize) {
    let res = certify(p, 60, DEFAULT_SAFETY).unwrap();
    let locator = AttractorLocator::new(&res.attractors, 1e-9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = p.trap().r;
    let mut unresolved = 0;
    let mut resolved = 0;
    for _ in 0..starts {
        let z = random_in_disc(&mut rng, r);
        match locator.assign(p, z, 10_000) {
            BasinOutcome::Unresolved => unresolved += 1,
            BasinOutcome::Attractor(i) => {
                assert!(i < res.attractors.len());
                resolved += 1;
            }
            _ => {}
        }
    }
    (unresolved, resolved)
}

#[test]
fn random_starts_resolve_for_certified_parameters() {
    for (poly, lambda) in [(unit_square(), 0.5), (triangle(), 0.7), (parallelogram(), 0.8)] {
        let p = params(poly, lambda);
        let starts = 100_000;
        let (unresolved, resolved) = monte_carlo_unresolved(&p, starts, 31);
        assert!(unresolved * 1000 <= starts, "{unresolved} unresolved");
        assert!(resolved > starts * 9 / 10);
    }
}
