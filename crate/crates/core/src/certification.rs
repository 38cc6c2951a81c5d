//! Certificates of asymptotic periodicity and the periodic attractors.
//!
//! Every depth-`n` continuity cell is mapped by `T^n` into the disc of radius
//! `r λ^n` about its H-point, so the limit set is covered by discs of radius
//! `2 r λ^n` around the H-points. Once all of those discs avoid the singular
//! rays, each cell is mapped strictly inside another one and the map is
//! asymptotically periodic. The certificate is for the given `(P, λ)` only.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{MapParams, StepFailure, TrapRadii};
use crate::error::{Error, Result};
use crate::geometry::ConeLocation;
use crate::symbolic::{ContinuityCell, Itinerary, Subdivision, SubdivisionConfig};
use crate::Point;

pub const DEFAULT_SAFETY: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificationStatus {
    Certified,
    Inconclusive,
}

/// One row of the covering test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub depth: usize,
    pub cells: usize,
    /// `m(n)`: smallest distance from an H-point to the singular rays.
    pub min_distance: f64,
    /// `2 r λ^n`.
    pub covering_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicAttractor {
    /// One period of the itinerary, in its lexicographically minimal rotation.
    pub itinerary: Itinerary,
    /// Fixed point of the composed branch of `itinerary`.
    pub point: Point,
    pub period: usize,
    /// `point` followed by its first `period - 1` images.
    pub orbit: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationResult {
    pub status: CertificationStatus,
    /// Depth at which the test succeeded, or the last depth tried.
    pub depth: usize,
    /// `m(n) - 2 r λ^n` at `depth`.
    pub margin: f64,
    pub safety: f64,
    pub trap: TrapRadii,
    pub attractors: Vec<PeriodicAttractor>,
    /// Depth used to enumerate the attractors (can exceed `depth`).
    pub attractor_depth: Option<usize>,
    pub history: Vec<DepthRecord>,
    pub diagnostics: String,
}

/// Smallest distance from the H-points of `cells` to the singular set.
pub fn min_singular_distance(params: &MapParams, cells: &[ContinuityCell]) -> f64 {
    let poly = params.polygon();
    cells
        .par_iter()
        .map(|c| poly.distance_to_singular_set(c.h_point()))
        .reduce(|| f64::INFINITY, f64::min)
}

/// Runs the covering test for `n = 1..=max_depth` and enumerates the
/// attractors once it succeeds.
pub fn certify(params: &MapParams, max_depth: usize, safety: f64) -> Result<CertificationResult> {
    certify_with(params, max_depth, safety, SubdivisionConfig::default())
}

/// Extra depth levels tried when the attractor graph is not yet strict at
/// the certified depth.
const ENUMERATION_RETRIES: usize = 8;

pub fn certify_with(
    params: &MapParams,
    max_depth: usize,
    safety: f64,
    config: SubdivisionConfig,
) -> Result<CertificationResult> {
    if !(safety >= 1.0) {
        return Err(Error::ParameterOutOfRange(format!("safety must be >= 1, got {safety}")));
    }
    if max_depth == 0 {
        return Err(Error::ParameterOutOfRange("max_depth must be at least 1".into()));
    }
    let trap = params.trap();
    let lambda = params.lambda();
    let tol = params.polygon().tolerance();
    let mut sub = Subdivision::new(params, trap, config);
    let mut history = Vec::new();
    for n in 1..=max_depth {
        sub.advance()?;
        let min_distance = min_singular_distance(params, sub.cells());
        let covering_radius = 2.0 * trap.r * lambda.powi(n as i32);
        history.push(DepthRecord {
            depth: n,
            cells: sub.cells().len(),
            min_distance,
            covering_radius,
        });
        if min_distance > safety * covering_radius {
            let margin = min_distance - covering_radius;
            let mut diagnostics = format!(
                "covering test passed at depth {n} with {} cells: m(n) = {min_distance:e}, 2 r lambda^n = {covering_radius:e}",
                sub.cells().len()
            );
            let mut attractors = Vec::new();
            let mut attractor_depth = None;
            for extra in 0..=ENUMERATION_RETRIES {
                if extra > 0 {
                    sub.advance()?;
                }
                match attractors_from_cells(params, sub.cells(), tol) {
                    Ok(found) => {
                        attractors = found;
                        attractor_depth = Some(sub.depth());
                        break;
                    }
                    Err(Error::NotStrictlyInside { cell, depth }) => {
                        diagnostics
                            .push_str(&format!("; cell {cell} not strictly inside at depth {depth}"));
                    }
                    Err(e) => return Err(e),
                }
            }
            if attractor_depth.is_none() {
                diagnostics.push_str("; attractors could not be enumerated");
            }
            return Ok(CertificationResult {
                status: CertificationStatus::Certified,
                depth: n,
                margin,
                safety,
                trap,
                attractors,
                attractor_depth,
                history,
                diagnostics,
            });
        }
    }
    let last = *history.last().expect("max_depth >= 1");
    Ok(CertificationResult {
        status: CertificationStatus::Inconclusive,
        depth: max_depth,
        margin: last.min_distance - last.covering_radius,
        safety,
        trap,
        attractors: Vec::new(),
        attractor_depth: None,
        history,
        diagnostics: format!(
            "covering test failed up to depth {max_depth}: m(n) = {:e}, 2 r lambda^n = {:e}",
            last.min_distance, last.covering_radius
        ),
    })
}

/// Periodic attractors read off the cell graph at `depth`.
pub fn enumerate_attractors(params: &MapParams, depth: usize, tol: f64) -> Result<Vec<PeriodicAttractor>> {
    let mut sub = Subdivision::new(params, params.trap(), SubdivisionConfig::default());
    if depth == 0 {
        return Err(Error::ParameterOutOfRange("depth must be at least 1".into()));
    }
    sub.advance_to(depth)?;
    attractors_from_cells(params, sub.cells(), tol)
}

/// Follows `depth` steps from `z`, requiring distance `> tol` from the
/// singular set at every step. Returns the itinerary.
fn strict_itinerary(params: &MapParams, mut z: Point, depth: usize, tol: f64) -> Option<Vec<u8>> {
    let poly = params.polygon();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        if poly.distance_to_singular_set(z) <= tol {
            return None;
        }
        let ConeLocation::Cone(k) = poly.cone_index(z) else {
            return None;
        };
        out.push(k as u8);
        z = params.branch(k, z);
    }
    Some(out)
}

/// Functional graph cell → cell containing the `T^n`-image of the cell.
fn successor_graph(params: &MapParams, cells: &[ContinuityCell], tol: f64) -> Result<Vec<usize>> {
    let depth = cells.first().map_or(0, |c| c.depth());
    let index: HashMap<&[u8], usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.itinerary.symbols(), i))
        .collect();
    cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let fail = Error::NotStrictlyInside { cell: i, depth };
            let mut target: Option<Vec<u8>> = None;
            for &w in &cell.image {
                let it = strict_itinerary(params, w, depth, tol).ok_or(Error::NotStrictlyInside {
                    cell: i,
                    depth,
                })?;
                match &target {
                    None => target = Some(it),
                    Some(t) if *t == it => {}
                    Some(_) => return Err(fail),
                }
            }
            let target = target.ok_or(Error::NotStrictlyInside { cell: i, depth })?;
            index.get(target.as_slice()).copied().ok_or(fail)
        })
        .collect()
}

/// Cycles of a functional graph, each listed from its smallest node.
fn functional_cycles(next: &[usize]) -> Vec<Vec<usize>> {
    // 0 = unvisited, 1 = on the current walk, 2 = done
    let mut state = vec![0u8; next.len()];
    let mut cycles = Vec::new();
    for start in 0..next.len() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = next[v];
        }
        if state[v] == 1 {
            let pos = path.iter().position(|&u| u == v).expect("node on current walk");
            let cycle = &path[pos..];
            let min_pos = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
            cycles.push(cycle[min_pos..].iter().chain(&cycle[..min_pos]).copied().collect());
        }
        for u in path {
            state[u] = 2;
        }
    }
    cycles
}

/// Fixed point of the composed branch of one period: `H(ī) / (1 - (-λ)^p)`.
pub fn periodic_point(params: &MapParams, block: &Itinerary) -> Point {
    let p = block.len() as i32;
    params.h_point(block) / (1.0 - (-params.lambda()).powi(p))
}

fn attractors_from_cells(
    params: &MapParams,
    cells: &[ContinuityCell],
    tol: f64,
) -> Result<Vec<PeriodicAttractor>> {
    let next = successor_graph(params, cells, tol)?;
    let depth = cells.first().map_or(0, |c| c.depth());
    let mut seen: HashMap<Itinerary, ()> = HashMap::new();
    let mut out = Vec::new();
    for cycle in functional_cycles(&next) {
        let full = cycle
            .iter()
            .fold(Itinerary::default(), |acc, &c| acc.concat(&cells[c].itinerary));
        let p = full.minimal_period();
        let block = Itinerary::new(full.iter().take(p).collect());
        let (block, _) = block.min_rotation();
        if seen.insert(block.clone(), ()).is_some() {
            continue;
        }
        let attractor = build_attractor(params, block, tol)
            .ok_or(Error::NotStrictlyInside { cell: cycle[0], depth })?;
        out.push(attractor);
    }
    out.sort_by(|a, b| a.itinerary.cmp(&b.itinerary));
    Ok(out)
}

/// Checks by iteration that the fixed point of `block` realizes `block`.
fn build_attractor(params: &MapParams, block: Itinerary, tol: f64) -> Option<PeriodicAttractor> {
    let point = periodic_point(params, &block);
    let poly = params.polygon();
    let mut orbit = Vec::with_capacity(block.len());
    let mut z = point;
    for k in block.iter() {
        if poly.distance_to_singular_set(z) <= tol || poly.cone_index(z) != ConeLocation::Cone(k) {
            return None;
        }
        orbit.push(z);
        z = params.branch(k, z);
    }
    let scale = params.trap().r.max(1.0);
    ((z - point).norm() <= 1e-10 * scale).then(|| PeriodicAttractor {
        period: block.len(),
        itinerary: block,
        point,
        orbit,
    })
}

/// Outcome of following one orbit toward the attractors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasinOutcome {
    Attractor(usize),
    Singular,
    Unresolved,
    InsidePolygon,
}

impl BasinOutcome {
    /// Raster label: attractor index, `-1` singular, `-2` unresolved, `-3` inside `P`.
    pub fn label(self) -> i32 {
        match self {
            BasinOutcome::Attractor(i) => i as i32,
            BasinOutcome::Singular => -1,
            BasinOutcome::Unresolved => -2,
            BasinOutcome::InsidePolygon => -3,
        }
    }
}

/// Spatial hash over all attractor orbit points.
pub struct AttractorLocator {
    cell: f64,
    tol: f64,
    grid: HashMap<(i64, i64), Vec<(Point, usize)>>,
}

impl AttractorLocator {
    pub fn new(attractors: &[PeriodicAttractor], tol: f64) -> Result<Self> {
        if attractors.is_empty() {
            return Err(Error::EmptyAttractorList);
        }
        let cell = tol.max(f64::MIN_POSITIVE);
        let mut grid: HashMap<(i64, i64), Vec<(Point, usize)>> = HashMap::new();
        for (i, a) in attractors.iter().enumerate() {
            for &z in &a.orbit {
                grid.entry(Self::key(cell, z)).or_default().push((z, i));
            }
        }
        Ok(Self { cell, tol, grid })
    }

    fn key(cell: f64, z: Point) -> (i64, i64) {
        ((z.x / cell).floor() as i64, (z.y / cell).floor() as i64)
    }

    /// Attractor with an orbit point within `tol` of `z`.
    pub fn find(&self, z: Point) -> Option<usize> {
        let (kx, ky) = Self::key(self.cell, z);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = self.grid.get(&(kx + dx, ky + dy)) else {
                    continue;
                };
                for &(p, i) in bucket {
                    let d = (p - z).norm();
                    if d <= self.tol && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, i));
                    }
                }
            }
        }
        best.map(|(_, i)| i)
    }

    pub fn assign(&self, params: &MapParams, z0: Point, max_iter: usize) -> BasinOutcome {
        if params.polygon().contains(z0) {
            return BasinOutcome::InsidePolygon;
        }
        let mut z = z0;
        for _ in 0..=max_iter {
            if let Some(i) = self.find(z) {
                return BasinOutcome::Attractor(i);
            }
            match params.step(z) {
                Ok((next, _)) => z = next,
                Err(StepFailure::SingularHit) | Err(StepFailure::EnteredPolygon) => {
                    return BasinOutcome::Singular
                }
            }
        }
        BasinOutcome::Unresolved
    }
}

/// Iterates from `z0` until it comes within `tol` of an attractor orbit point.
pub fn basin_assign(
    params: &MapParams,
    attractors: &[PeriodicAttractor],
    z0: Point,
    max_iter: usize,
    tol: f64,
) -> Result<BasinOutcome> {
    Ok(AttractorLocator::new(attractors, tol)?.assign(params, z0, max_iter))
}
