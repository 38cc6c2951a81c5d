mod common;

use common::*;
use obc_core::convex::cross;
use obc_core::dynamics::StepFailure;
use obc_core::{ConeLocation, ConvexPolygon, MapParams, OrbitStatus, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Supporting vertex found by brute force: the vertex `v` such that the
/// whole polygon lies left of the directed line from `z` through `v`.
fn supporting_vertex(poly: &ConvexPolygon, z: Point) -> Option<usize> {
    (0..poly.len()).find(|&k| {
        let v = poly.vertex(k);
        (0..poly.len()).all(|j| j == k || cross(v - z, poly.vertex(j) - z) > 0.0)
    })
}

#[test]
fn cone_index_agrees_with_supporting_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let poly = random_polygon(&mut rng);
        for _ in 0..50 {
            let z = random_in_disc(&mut rng, 6.0);
            match poly.cone_index(z) {
                ConeLocation::Cone(k) => {
                    if poly.distance_to_singular_set(z) > 1e-9 {
                        assert_eq!(supporting_vertex(&poly, z), Some(k));
                    }
                }
                ConeLocation::InsidePolygon => assert!(poly.contains(z)),
                ConeLocation::OnSingularSet => {}
            }
        }
    }
}

#[test]
fn contraction_within_a_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let p = params(random_polygon(&mut rng), rng.gen_range(0.01..0.99));
        let z1 = random_in_disc(&mut rng, 5.0);
        let Ok((w1, k)) = p.step(z1) else { continue };
        let z2 = z1 + Point::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3));
        let Ok((w2, k2)) = p.step(z2) else { continue };
        if k == k2 {
            let ratio = (w1 - w2).norm() / (z1 - z2).norm();
            assert!((ratio - p.lambda()).abs() < 1e-9);
        }
    }
}

#[test]
fn trap_disc_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    for _ in 0..100 {
        let p = params(random_polygon(&mut rng), rng.gen_range(0.01..0.99));
        let r = p.trap().r;
        for _ in 0..100 {
            let z = random_in_disc(&mut rng, r);
            if let Ok((w, _)) = p.step(z) {
                assert!(w.norm() <= r * (1.0 + 1e-12), "{} > {r}", w.norm());
                checked += 1;
            }
        }
    }
    assert!(checked > 9000);
}

#[test]
fn closed_form_matches_iteration_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut compared = 0;
    for _ in 0..2_000 {
        let p = params(random_polygon(&mut rng), rng.gen_range(0.01..0.99));
        let r = p.trap().r;
        let z0 = random_in_disc(&mut rng, r);
        let n = rng.gen_range(0..=50);
        let o = p.orbit(z0, n);
        if o.status != OrbitStatus::Completed {
            continue;
        }
        let end = p.orbit_closed_form(z0, &o.itinerary);
        assert!((end - o.points[n]).norm() <= 1e-9 * r);
        compared += 1;
    }
    assert!(compared > 1_800);
}

#[test]
fn equivariance_under_similarities() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let poly = random_polygon(&mut rng);
        let lambda = rng.gen_range(0.05..0.95);
        let (scale, angle) = (rng.gen_range(0.2..3.0), rng.gen_range(-3.0..3.0));
        let shift = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let moved = poly.transformed(scale, angle, shift).unwrap();
        let g = |z: Point| {
            let (s, c) = f64::sin_cos(angle);
            Point::new(c * z.x - s * z.y, s * z.x + c * z.y) * scale + shift
        };
        let (p, q) = (params(poly, lambda), params(moved, lambda));
        let z = random_in_disc(&mut rng, 5.0);
        if p.polygon().distance_to_singular_set(z) < 1e-6 {
            continue;
        }
        if let (Ok((w, k)), Ok((gw, gk))) = (p.step(z), q.step(g(z))) {
            assert_eq!(k, gk);
            assert!((g(w) - gw).norm() < 1e-10 * scale.max(1.0) * 10.0);
        }
    }
}

#[test]
fn singular_and_interior_points_fail_cleanly() {
    let p = params(heptagon(), 0.4);
    for ray in p.polygon().singular_rays() {
        assert_eq!(p.step(ray.at(0.7)), Err(StepFailure::SingularHit));
    }
    assert_eq!(p.step(Point::new(0.1, 0.2)), Err(StepFailure::EnteredPolygon));
    let o = p.orbit(Point::new(0.1, 0.2), 5);
    assert_eq!(o.status, OrbitStatus::EnteredPolygonError(0));
}

#[test]
fn trap_radius_is_monotone() {
    let poly = triangle();
    let mut last = 0.0;
    for i in 1..10 {
        let r = params(poly.clone(), i as f64 / 10.0).trap().r;
        assert!(r > last);
        last = r;
    }
    let p = params(poly, 0.3);
    assert!(p.trap_radii(0.2).unwrap().r > p.trap_radii(0.1).unwrap().r);
}

fn arb_polygon() -> impl Strategy<Value = ConvexPolygon> {
    any::<u64>().prop_map(|seed| random_polygon(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #[test]
    fn prop_step_stays_outside_polygon(
        poly in arb_polygon(),
        lambda in 0.01f64..0.99,
        x in -4.0f64..4.0,
        y in -4.0f64..4.0,
    ) {
        let p = MapParams::new(poly, lambda).unwrap();
        if let Ok((w, k)) = p.step(Point::new(x, y)) {
            prop_assert!(!p.polygon().contains(w));
            let v = p.polygon().vertex(k);
            prop_assert!((w - v).norm() <= lambda * (Point::new(x, y) - v).norm() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn prop_two_symbol_fixed_point(poly in arb_polygon(), lambda in 0.01f64..0.99, k in 0usize..3, j in 0usize..3) {
        prop_assume!(k != j);
        let p = MapParams::new(poly, lambda).unwrap();
        let x = p.two_symbol_fixed_point(k, j).unwrap();
        let fx = p.branch(j, p.branch(k, x));
        prop_assert!((fx - x).norm() < 1e-9 * (1.0 + x.norm()));
        let (vk, vj) = (p.polygon().vertex(k), p.polygon().vertex(j));
        prop_assert!(cross(vj - vk, x - vk).abs() <= 1e-9 * (1.0 + x.norm()));
    }
}
