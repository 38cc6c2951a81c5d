mod common;

use common::*;
use obc_core::convex::{self, cross};
use obc_core::symbolic::{
    connection_determinant, detect_singular_connections, itinerary_counts, singular_set_order_n,
    subdivide, three_symbol_depth, Subdivision, SubdivisionConfig,
};
use obc_core::{Itinerary, MapParams, OrbitStatus, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cases() -> Vec<(MapParams, usize)> {
    vec![
        (params(unit_square(), 0.5), 8),
        (params(triangle(), 0.7), 10),
        (params(heptagon(), 0.9), 12),
        (params(heptagon(), 0.3), 6),
    ]
}

#[test]
fn cells_cover_the_disc_outside_the_polygon() {
    for (p, depth) in cases() {
        let mut sub = Subdivision::new(&p, p.trap(), SubdivisionConfig::default());
        let expected = convex::signed_area(sub.disc()) - p.polygon().area();
        sub.advance_to(depth).unwrap();
        let cells: f64 = sub.cells().iter().map(|c| c.domain_area).sum();
        let slivers: f64 = sub.slivers().iter().map(|s| s.area).sum();
        let rel = ((cells + slivers) - expected).abs() / expected;
        assert!(rel < 1e-6, "relative cover error {rel}");
    }
}

#[test]
fn itineraries_of_points_match_their_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (p, depth) in cases() {
        let cells = subdivide(&p, depth, p.trap()).unwrap();
        let regions: Vec<Vec<Point>> = cells.iter().map(|c| c.region()).collect();
        let r = p.trap().r;
        let mut matched = 0;
        for _ in 0..2_500 {
            let z = random_in_disc(&mut rng, 0.95 * r);
            if p.polygon().contains(z) {
                continue;
            }
            let inside: Vec<usize> = (0..cells.len())
                .filter(|&i| convex::inside_margin(&regions[i], z) > 1e-9 * r)
                .collect();
            let o = p.orbit(z, depth);
            if inside.is_empty() {
                continue;
            }
            assert_eq!(inside.len(), 1, "cells overlap at {z:?}");
            assert_eq!(o.status, OrbitStatus::Completed);
            assert_eq!(o.itinerary, cells[inside[0]].itinerary);
            matched += 1;
        }
        assert!(matched > 2_000, "only {matched} points matched");
    }
}

#[test]
fn stored_affine_maps_reproduce_iteration() {
    for (p, depth) in cases() {
        let r = p.trap().r;
        for cell in subdivide(&p, depth, p.trap()).unwrap() {
            for z in cell.region() {
                let mut w = z;
                for k in cell.itinerary.iter() {
                    w = p.branch(k, w);
                }
                assert!((cell.affine.apply(z) - w).norm() <= 1e-9 * r);
            }
            let c = convex::centroid(&cell.region());
            if convex::inside_margin(&cell.region(), c) > 1e-9 * r {
                let o = p.orbit(c, depth);
                assert_eq!(o.itinerary, cell.itinerary);
            }
        }
    }
}

#[test]
fn square_lambda_half_combinatorics() {
    let p = params(unit_square(), 0.5);
    let counts = itinerary_counts(&p, 6, p.trap(), SubdivisionConfig::default()).unwrap();
    assert_eq!(counts[0].count, 4);
    assert_eq!(counts[1].count, 8);
    assert!(counts.iter().all(|c| c.sliver_inclusive >= c.count));
}

#[test]
fn heptagon_growth_diagnostic_trends_down() {
    let p = params(heptagon(), 0.9);
    let counts = itinerary_counts(&p, 25, p.trap(), SubdivisionConfig::default()).unwrap();
    let growth: Vec<f64> = counts[4..].iter().map(|c| c.log_growth).collect();
    assert!(growth.last().unwrap() < growth.first().unwrap());
}

#[test]
fn singular_segments_iterate_onto_the_rays() {
    for (p, _) in cases() {
        let n = 6;
        let segs = singular_set_order_n(&p, n, p.trap(), SubdivisionConfig::default()).unwrap();
        for s in &segs {
            assert_eq!(s.itinerary.len(), s.order - 1);
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let mut z = s.start + (s.end - s.start) * t;
                for k in s.itinerary.iter() {
                    z = p.branch(k, z);
                }
                let ray = p.polygon().singular_rays()[s.ray];
                assert!(ray.distance(z) < 1e-9, "order {} off by {}", s.order, ray.distance(z));
            }
        }
    }
}

#[test]
fn singular_sets_are_nested() {
    let p = params(triangle(), 0.6);
    let mut last = 0;
    for n in 1..=7 {
        let segs = singular_set_order_n(&p, n, p.trap(), SubdivisionConfig::default()).unwrap();
        assert!(segs.len() >= last);
        let order_one = segs.iter().filter(|s| s.order == 1).count();
        assert_eq!(order_one, 3);
        last = segs.len();
    }
}

#[test]
fn three_symbol_depth_for_square_and_heptagon() {
    let sq = params(unit_square(), 0.5);
    assert_eq!(three_symbol_depth(&sq, sq.trap(), SubdivisionConfig::default(), 50), Some(4));
    let hept = params(heptagon(), 0.9);
    let n = three_symbol_depth(&hept, hept.trap(), SubdivisionConfig::default(), 50).unwrap();
    let cells = subdivide(&hept, n, hept.trap()).unwrap();
    assert!(cells.iter().all(|c| c.itinerary.distinct_symbols() >= 3));
}

#[test]
fn square_has_no_singular_connections() {
    let p = params(unit_square(), 0.5);
    let found = detect_singular_connections(&p, 8, 1e-9, p.trap(), 10_000_000).unwrap();
    assert!(found.is_empty(), "{found:?}");
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn hand_built_singular_connection() {
    // Solve the determinant in λ for a fixed itinerary, then follow an orbit
    // segment that starts on the extension of the side beyond its end vertex.
    let poly = triangle();
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let mut candidates = Vec::new();
    for len in 2..=5u32 {
        for code in 0..3usize.pow(len) {
            let syms: Vec<usize> = (0..len).map(|i| code / 3usize.pow(i) % 3).collect();
            for side in 0..3 {
                candidates.push((Itinerary::new(syms.clone()), side));
            }
        }
    }
    let (it, side, lo, hi) = candidates
        .into_iter()
        .filter(|(it, _)| !it.has_consecutive_repeat())
        .find_map(|(it, side)| {
            let det = |l: f64| connection_determinant(&params(poly.clone(), l), &it, side);
            grid.windows(2)
                .find(|w| det(w[0]) * det(w[1]) < 0.0)
                .map(|w| (it.clone(), side, w[0], w[1]))
        })
        .expect("some itinerary has a sign change");
    let det = |l: f64| connection_determinant(&params(poly.clone(), l), &it, side);
    let lambda = bisect(det, lo, hi);
    let p = params(poly.clone(), lambda);
    assert!(det(lambda).abs() < 1e-12);
    let (v0, v1) = (poly.vertex(side), poly.vertex(side + 1));
    let e = v1 - v0;
    let mut x = v1 + e * 0.7;
    let x1 = x;
    for k in it.iter() {
        x = p.branch(k, x);
    }
    // x_n is back on the line of the side
    assert!(cross(x - v0, e).abs() / e.norm() < 1e-12);
    assert!(cross(x1 - v0, e).abs() < 1e-15);
    let translated = p.polygon().transformed(1.0, 0.0, Point::new(-2.0, 5.0)).unwrap();
    let q = params(translated, lambda);
    assert!(connection_determinant(&q, &it, side).abs() < 1e-12);
}

#[test]
fn subdivision_is_independent_of_thread_count() {
    let p = params(heptagon(), 0.8);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| subdivide(&p, 10, p.trap()).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn random_polygons_have_sorted_clean_itineraries() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let p = params(random_polygon(&mut rng), rng.gen_range(0.1..0.8));
        let cells = subdivide(&p, 5, p.trap()).unwrap();
        assert!(cells.windows(2).all(|w| w[0].itinerary < w[1].itinerary));
        assert!(cells.iter().all(|c| !c.itinerary.has_consecutive_repeat()));
        assert!(cells.iter().all(|c| c.domain_area > 0.0));
    }
}
