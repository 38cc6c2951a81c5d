//! Itineraries and the continuity domains of `T^n`.
//!
//! The trap disc `K` is replaced by its inscribed regular polygon (64 sides by
//! default), so every cell is a convex polygon and all clipping is
//! polygon-against-half-plane. A cell of depth `n` is stored through its
//! forward image `T^n(cell)`: the next symbol is read off by clipping that
//! image against the cones, and the domain itself is recovered with the
//! inverse of the composed similarity `z ↦ (-λ)^n z + H`.
//!
//! The itinerary sets here are the fixed-parameter sets `I_n(P, λ)`, which
//! are subsets of the parameter-uniform sets used in the theory; that is all
//! a fixed-parameter certificate needs.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::{self, cross, HalfPlane};
use crate::dynamics::{MapParams, TrapRadii};
use crate::error::{Error, Result};
use crate::Point;

/// Finite sequence of cone indices (0-based, at most 256 cones).
/// Serialized and displayed with 1-based labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Itinerary(Vec<u8>);

impl Itinerary {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self(symbols.into_iter().map(to_symbol).collect())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, k: usize) {
        self.0.push(to_symbol(k));
    }

    pub fn extended(&self, k: usize) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.extend_from_slice(&self.0);
        out.push(to_symbol(k));
        Self(out)
    }

    pub fn concat(&self, other: &Itinerary) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Self(out)
    }

    pub fn suffix(&self, n: usize) -> Self {
        Self(self.0[self.0.len() - n..].to_vec())
    }

    pub fn has_consecutive_repeat(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    pub fn distinct_symbols(&self) -> usize {
        let mut seen = [false; 256];
        self.0.iter().filter(|&&s| !std::mem::replace(&mut seen[s as usize], true)).count()
    }

    /// Smallest `p` such that the sequence is `p`-periodic and `p` divides the length.
    pub fn minimal_period(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]))
            .unwrap_or(n)
    }

    /// Lexicographically smallest cyclic rotation, with its offset.
    pub fn min_rotation(&self) -> (Itinerary, usize) {
        let n = self.0.len();
        let mut best = 0;
        for start in 1..n {
            let cand = (0..n).map(|i| self.0[(start + i) % n]);
            let cur = (0..n).map(|i| self.0[(best + i) % n]);
            if cand.lt(cur) {
                best = start;
            }
        }
        let rotated = (0..n).map(|i| self.0[(best + i) % n]).collect();
        (Itinerary(rotated), best)
    }

    /// 1-based labels.
    pub fn labels(&self) -> Vec<usize> {
        self.iter().map(|s| s + 1).collect()
    }
}

fn to_symbol(k: usize) -> u8 {
    u8::try_from(k).expect("cone index exceeds 255")
}

impl From<Itinerary> for Vec<usize> {
    fn from(it: Itinerary) -> Self {
        it.labels()
    }
}

impl TryFrom<Vec<usize>> for Itinerary {
    type Error = String;

    fn try_from(labels: Vec<usize>) -> std::result::Result<Self, String> {
        labels
            .into_iter()
            .map(|l| {
                l.checked_sub(1)
                    .and_then(|s| u8::try_from(s).ok())
                    .ok_or_else(|| format!("invalid cone label {l}"))
            })
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map(Itinerary)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        write!(f, ")")
    }
}

/// Composed branch map `z ↦ scale · z + shift` with `scale = (-λ)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub scale: f64,
    pub shift: Point,
}

impl Similarity {
    #[inline]
    pub fn apply(&self, z: Point) -> Point {
        z * self.scale + self.shift
    }

    #[inline]
    pub fn invert(&self, w: Point) -> Point {
        (w - self.shift) / self.scale
    }
}

/// Continuity domain of `T^n` on the (polygonal) trap disc.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityCell {
    pub itinerary: Itinerary,
    /// `T^n(region)`, counter-clockwise.
    pub image: Vec<Point>,
    pub affine: Similarity,
    pub domain_area: f64,
}

impl ContinuityCell {
    pub fn depth(&self) -> usize {
        self.itinerary.len()
    }

    /// The H-point of the itinerary (translation part of the composed map).
    pub fn h_point(&self) -> Point {
        self.affine.shift
    }

    /// The domain polygon.
    pub fn region(&self) -> Vec<Point> {
        self.image.iter().map(|&w| self.affine.invert(w)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionConfig {
    /// Sides of the polygon inscribed in the trap disc.
    pub disc_sides: usize,
    pub max_cells: usize,
    /// Cells with domain area below `sliver_rel_area · r²` are dropped.
    pub sliver_rel_area: f64,
}

impl Default for SubdivisionConfig {
    fn default() -> Self {
        Self {
            disc_sides: 64,
            max_cells: 10_000_000,
            sliver_rel_area: 1e-14,
        }
    }
}

/// Slivers dropped while building one depth level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SliverStats {
    pub count: usize,
    pub area: f64,
}

enum Piece {
    Empty,
    Sliver(f64),
    Cell(ContinuityCell),
}

/// Level-by-level construction of the continuity domains.
pub struct Subdivision<'a> {
    params: &'a MapParams,
    trap: TrapRadii,
    config: SubdivisionConfig,
    disc: Vec<Point>,
    cells: Vec<ContinuityCell>,
    slivers: Vec<SliverStats>,
}

impl<'a> Subdivision<'a> {
    pub fn new(params: &'a MapParams, trap: TrapRadii, config: SubdivisionConfig) -> Self {
        let disc = convex::regular_polygon(trap.r, config.disc_sides);
        let root = ContinuityCell {
            itinerary: Itinerary::default(),
            image: disc.clone(),
            affine: Similarity {
                scale: 1.0,
                shift: Point::zeros(),
            },
            domain_area: convex::signed_area(&disc),
        };
        Self {
            params,
            trap,
            config,
            disc,
            cells: vec![root],
            slivers: Vec::new(),
        }
    }

    pub fn params(&self) -> &MapParams {
        self.params
    }

    pub fn trap(&self) -> TrapRadii {
        self.trap
    }

    pub fn depth(&self) -> usize {
        self.slivers.len()
    }

    /// The polygon standing in for the trap disc.
    pub fn disc(&self) -> &[Point] {
        &self.disc
    }

    pub fn cells(&self) -> &[ContinuityCell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<ContinuityCell> {
        self.cells
    }

    /// Sliver statistics per depth (index 0 is depth 1).
    pub fn slivers(&self) -> &[SliverStats] {
        &self.slivers
    }

    fn sliver_area_threshold(&self) -> f64 {
        self.config.sliver_rel_area * self.trap.r * self.trap.r
    }

    /// Restricts `cell` to cone `k` and maps it forward by that branch.
    fn piece(&self, cell: &ContinuityCell, k: usize, scratch: &mut Vec<Point>) -> Piece {
        let poly = self.params.polygon();
        let [h1, h2] = poly.cone_halfplanes(k);
        convex::clip_into(&cell.image, h1, scratch);
        if scratch.len() < 3 {
            return Piece::Empty;
        }
        let clipped = convex::clip(scratch, h2);
        if clipped.len() < 3 {
            return Piece::Empty;
        }
        let area = convex::signed_area(&clipped);
        if area <= 0.0 {
            return Piece::Empty;
        }
        let lambda = self.params.lambda();
        let domain_area = area / (cell.affine.scale * cell.affine.scale);
        if domain_area < self.sliver_area_threshold() || convex::thickness(&clipped) < poly.tolerance()
        {
            return Piece::Sliver(domain_area);
        }
        let image = clipped.iter().map(|&z| self.params.branch(k, z)).collect();
        let v = poly.vertex(k);
        Piece::Cell(ContinuityCell {
            itinerary: cell.itinerary.extended(k),
            image,
            affine: Similarity {
                scale: -lambda * cell.affine.scale,
                shift: v + (v - cell.affine.shift) * lambda,
            },
            domain_area,
        })
    }

    fn children(&self, cell: &ContinuityCell) -> (Vec<ContinuityCell>, SliverStats) {
        let mut scratch = Vec::with_capacity(cell.image.len() + 2);
        let mut out = Vec::new();
        let mut stats = SliverStats::default();
        for k in 0..self.params.polygon().len() {
            match self.piece(cell, k, &mut scratch) {
                Piece::Empty => {}
                Piece::Sliver(a) => {
                    stats.count += 1;
                    stats.area += a;
                }
                Piece::Cell(c) => out.push(c),
            }
        }
        (out, stats)
    }

    /// Builds the next depth level. Children are emitted in lexicographic
    /// itinerary order because parents are sorted and cones are visited in order.
    pub fn advance(&mut self) -> Result<()> {
        let parts: Vec<(Vec<ContinuityCell>, SliverStats)> =
            self.cells.par_iter().map(|c| self.children(c)).collect();
        let total: usize = parts.iter().map(|p| p.0.len()).sum();
        if total > self.config.max_cells {
            return Err(Error::DepthTooLarge {
                depth: self.depth() + 1,
                cap: self.config.max_cells,
            });
        }
        let mut cells = Vec::with_capacity(total);
        let mut stats = SliverStats::default();
        for (c, s) in parts {
            cells.extend(c);
            stats.count += s.count;
            stats.area += s.area;
        }
        self.cells = cells;
        self.slivers.push(stats);
        Ok(())
    }

    pub fn advance_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            self.advance()?;
        }
        Ok(())
    }
}

/// All depth-`n` continuity cells inside the (polygonal) trap disc.
pub fn subdivide(params: &MapParams, depth: usize, trap: TrapRadii) -> Result<Vec<ContinuityCell>> {
    subdivide_with(params, depth, trap, SubdivisionConfig::default())
}

pub fn subdivide_with(
    params: &MapParams,
    depth: usize,
    trap: TrapRadii,
    config: SubdivisionConfig,
) -> Result<Vec<ContinuityCell>> {
    if depth == 0 {
        return Err(Error::ParameterOutOfRange("depth must be at least 1".into()));
    }
    let mut sub = Subdivision::new(params, trap, config);
    sub.advance_to(depth)?;
    Ok(sub.into_cells())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub depth: usize,
    /// Cells kept after the sliver policy.
    pub count: usize,
    /// Slivers dropped at this depth.
    pub slivers: usize,
    pub sliver_inclusive: usize,
    /// `log(count) / depth`.
    pub log_growth: f64,
}

/// `#I_n(P, λ)` for `n = 1..=max_depth`.
pub fn itinerary_counts(
    params: &MapParams,
    max_depth: usize,
    trap: TrapRadii,
    config: SubdivisionConfig,
) -> Result<Vec<LevelCount>> {
    let mut sub = Subdivision::new(params, trap, config);
    let mut out = Vec::with_capacity(max_depth);
    for depth in 1..=max_depth {
        sub.advance()?;
        let count = sub.cells().len();
        let slivers = sub.slivers()[depth - 1].count;
        out.push(LevelCount {
            depth,
            count,
            slivers,
            sliver_inclusive: count + slivers,
            log_growth: (count as f64).ln() / depth as f64,
        });
    }
    Ok(out)
}

/// A straight piece of the singular set of order `n`: the points `z` of the
/// segment satisfy `T^{order-1}(z) ∈ S_P` along `itinerary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSegment {
    pub start: Point,
    pub end: Point,
    pub order: usize,
    /// Index of the singular ray hit after `order - 1` steps.
    pub ray: usize,
    pub itinerary: Itinerary,
}

fn ray_segments_in_disc(params: &MapParams, disc: &[Point], r: f64) -> Vec<(usize, Point, Point)> {
    let poly = params.polygon();
    poly.singular_rays()
        .iter()
        .enumerate()
        .filter_map(|(k, ray)| {
            let far = ray.at(2.0 * r + poly.norm());
            convex::clip_segment(disc, ray.origin, far).map(|(t0, t1)| {
                let d = far - ray.origin;
                (k, ray.origin + d * t0, ray.origin + d * t1)
            })
        })
        .collect()
}

/// `S^n ∩ K`: the singular rays clipped to the disc, plus their preimages
/// under the composed branches of depth `1..n-1`.
pub fn singular_set_order_n(
    params: &MapParams,
    n: usize,
    trap: TrapRadii,
    config: SubdivisionConfig,
) -> Result<Vec<SingularSegment>> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("order must be at least 1".into()));
    }
    let mut sub = Subdivision::new(params, trap, config);
    let rays = ray_segments_in_disc(params, sub.disc(), trap.r);
    let tol = params.polygon().tolerance();
    let mut segments: Vec<SingularSegment> = rays
        .iter()
        .map(|&(k, a, b)| SingularSegment {
            start: a,
            end: b,
            order: 1,
            ray: k,
            itinerary: Itinerary::default(),
        })
        .collect();
    for m in 1..n {
        sub.advance()?;
        let found: Vec<Vec<SingularSegment>> = sub
            .cells()
            .par_iter()
            .map(|cell| {
                rays.iter()
                    .filter_map(|&(k, a, b)| {
                        let (t0, t1) = convex::clip_segment(&cell.image, a, b)?;
                        let (p0, p1) = (a + (b - a) * t0, a + (b - a) * t1);
                        if (p1 - p0).norm() <= tol {
                            return None;
                        }
                        Some(SingularSegment {
                            start: cell.affine.invert(p0),
                            end: cell.affine.invert(p1),
                            order: m + 1,
                            ray: k,
                            itinerary: cell.itinerary.clone(),
                        })
                    })
                    .collect()
            })
            .collect();
        segments.extend(found.into_iter().flatten());
    }
    Ok(segments)
}

/// Smallest `N` such that every admissible itinerary of order `N` uses at
/// least three distinct symbols, searched up to `cap`.
///
/// Itineraries with two symbols alternate, so only the `d (d - 1)`
/// alternating branches are followed.
pub fn three_symbol_depth(
    params: &MapParams,
    trap: TrapRadii,
    config: SubdivisionConfig,
    cap: usize,
) -> Option<usize> {
    let sub = Subdivision::new(params, trap, config);
    let d = params.polygon().len();
    let root = &sub.cells()[0];
    let mut longest = 1;
    let mut scratch = Vec::new();
    for k in 0..d {
        for j in 0..d {
            if j == k {
                continue;
            }
            let Piece::Cell(mut cell) = sub.piece(root, k, &mut scratch) else {
                continue;
            };
            let mut len = 1;
            loop {
                let next = if len % 2 == 1 { j } else { k };
                match sub.piece(&cell, next, &mut scratch) {
                    Piece::Cell(c) => {
                        cell = c;
                        len += 1;
                        if len >= cap {
                            return None;
                        }
                    }
                    _ => break,
                }
            }
            longest = longest.max(len);
        }
    }
    Some((longest + 1).max(3))
}

/// `det(H(i_1..i_m) - (1 - (-λ)^m) v_k, v_{k+1} - v_k)`: zero exactly when the
/// composed branch of the itinerary maps the line of side `k` onto itself.
pub fn connection_determinant(params: &MapParams, itinerary: &Itinerary, side: usize) -> f64 {
    let poly = params.polygon();
    let m = itinerary.len() as i32;
    let h = params.h_point(itinerary);
    let vk = poly.vertex(side);
    let e = poly.vertex(side + 1) - vk;
    cross(h - vk * (1.0 - (-params.lambda()).powi(m)), e)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularConnectionReport {
    /// Symbols `i_1..i_{n-1}` of the orbit segment `x_1..x_n`.
    pub itinerary: Itinerary,
    pub side: usize,
    pub residual: f64,
    /// Whether the image segment meets the singular ray on the line of `side`.
    pub lands_on_singular_ray: bool,
}

/// Scans orbit segments starting on the non-singular extension of each side
/// (beyond `v_{k+1}`) for images that fall back onto the same side line.
pub fn detect_singular_connections(
    params: &MapParams,
    n_max: usize,
    tol: f64,
    trap: TrapRadii,
    max_pieces: usize,
) -> Result<Vec<SingularConnectionReport>> {
    if n_max < 2 {
        return Err(Error::ParameterOutOfRange("n_max must be at least 2".into()));
    }
    let poly = params.polygon();
    let d = poly.len();
    let disc = convex::regular_polygon(trap.r, SubdivisionConfig::default().disc_sides);
    let eps = poly.tolerance();
    let mut reports = Vec::new();
    for side in 0..d {
        let base = poly.vertex(side + 1);
        let dir = (base - poly.vertex(side)).normalize();
        let Some((t0, t1)) = convex::clip_segment(&disc, base, base + dir * (2.0 * trap.r + poly.norm()))
        else {
            continue;
        };
        let far = base + dir * (2.0 * trap.r + poly.norm());
        let (a, b) = (base + (far - base) * t0, base + (far - base) * t1);
        let ray = poly.singular_rays()[side];
        let mut pieces = vec![(a, b, Itinerary::default())];
        for _ in 1..n_max {
            let mut next = Vec::new();
            for (a, b, it) in &pieces {
                for k in 0..d {
                    let Some((s0, s1)) = clip_segment_to_cone(params, k, *a, *b) else {
                        continue;
                    };
                    let (p, q) = (*a + (*b - *a) * s0, *a + (*b - *a) * s1);
                    if (q - p).norm() <= eps {
                        continue;
                    }
                    next.push((params.branch(k, p), params.branch(k, q), it.extended(k)));
                }
            }
            if next.len() > max_pieces {
                return Err(Error::DepthTooLarge {
                    depth: next[0].2.len() + 1,
                    cap: max_pieces,
                });
            }
            for (p, q, it) in &next {
                let residual = connection_determinant(params, it, side).abs();
                if residual < tol {
                    let hit = crate::convex::distance_to_segment(ray.origin, *p, *q) <= tol
                        || segment_meets_ray(*p, *q, ray.origin, ray.direction, tol);
                    reports.push(SingularConnectionReport {
                        itinerary: it.clone(),
                        side,
                        residual,
                        lands_on_singular_ray: hit,
                    });
                }
            }
            pieces = next;
        }
    }
    Ok(reports)
}

fn clip_segment_to_cone(params: &MapParams, k: usize, a: Point, b: Point) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for hp in params.polygon().cone_halfplanes(k) {
        let (da, db) = (hp.signed_distance(a), hp.signed_distance(b));
        clip_param(da, db, &mut t0, &mut t1)?;
    }
    (t1 > t0).then_some((t0, t1))
}

fn clip_param(da: f64, db: f64, t0: &mut f64, t1: &mut f64) -> Option<()> {
    match (da <= 0.0, db <= 0.0) {
        (true, true) => Some(()),
        (false, false) => None,
        (true, false) => {
            *t1 = t1.min(da / (da - db));
            Some(())
        }
        (false, true) => {
            *t0 = t0.max(da / (da - db));
            Some(())
        }
    }
}

fn segment_meets_ray(p: Point, q: Point, origin: Point, dir: Point, tol: f64) -> bool {
    let hp = HalfPlane::through(origin, -dir);
    // only the part of the segment beyond the ray origin counts
    let (mut t0, mut t1) = (0.0, 1.0);
    if clip_param(hp.signed_distance(p), hp.signed_distance(q), &mut t0, &mut t1).is_none() {
        return false;
    }
    let (p, q) = (p + (q - p) * t0, p + (q - p) * t1);
    cross(dir, p - origin).abs() <= tol || cross(dir, q - origin).abs() <= tol
        || cross(dir, p - origin).signum() != cross(dir, q - origin).signum()
}
