//! The contracted outer billiard map `T(z) = -λ z + (1 + λ) v_k` on cone `k`,
//! orbits, the closed-form orbit algebra and the trapping disc.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConeLocation, ConvexPolygon};
use crate::symbolic::Itinerary;
use crate::Point;

/// A polygon together with a contraction `λ ∈ (0, 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct MapParams {
    polygon: ConvexPolygon,
    lambda: f64,
}

/// Why a step could not be taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepFailure {
    SingularHit,
    EnteredPolygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    Completed,
    /// The point reached after this many steps lies on the singular set.
    SingularHit(usize),
    /// The point reached after this many steps lies inside the polygon.
    EnteredPolygonError(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub points: Vec<Point>,
    pub itinerary: Itinerary,
    pub status: OrbitStatus,
}

/// Radii of the trapping disc `K`: `r = b (1 + a) / (1 - a)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapRadii {
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

impl MapParams {
    pub fn new(polygon: ConvexPolygon, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "lambda must lie in (0, 1), got {lambda}"
            )));
        }
        Ok(Self { polygon, lambda })
    }

    pub fn polygon(&self) -> &ConvexPolygon {
        &self.polygon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Branch map of cone `k`, extended to the whole plane.
    #[inline]
    pub fn branch(&self, k: usize, z: Point) -> Point {
        let v = self.polygon.vertex(k);
        v + (v - z) * self.lambda
    }

    pub fn step(&self, z: Point) -> std::result::Result<(Point, usize), StepFailure> {
        match self.polygon.cone_index(z) {
            ConeLocation::Cone(k) => Ok((self.branch(k, z), k)),
            ConeLocation::OnSingularSet => Err(StepFailure::SingularHit),
            ConeLocation::InsidePolygon => Err(StepFailure::EnteredPolygon),
        }
    }

    pub fn orbit(&self, z0: Point, n_steps: usize) -> OrbitResult {
        let mut points = Vec::with_capacity(n_steps + 1);
        let mut symbols = Vec::with_capacity(n_steps);
        points.push(z0);
        let mut z = z0;
        let mut status = OrbitStatus::Completed;
        for i in 0..n_steps {
            match self.step(z) {
                Ok((next, k)) => {
                    symbols.push(k);
                    points.push(next);
                    z = next;
                }
                Err(StepFailure::SingularHit) => {
                    status = OrbitStatus::SingularHit(i);
                    break;
                }
                Err(StepFailure::EnteredPolygon) => {
                    status = OrbitStatus::EnteredPolygonError(i);
                    break;
                }
            }
        }
        OrbitResult {
            points,
            itinerary: Itinerary::new(symbols),
            status,
        }
    }

    /// `(-λ)^n z0 + (1 + λ) Σ_j (-λ)^{n-j-1} v_{i_j}`.
    pub fn orbit_closed_form(&self, z0: Point, itinerary: &Itinerary) -> Point {
        let n = itinerary.len() as i32;
        (-self.lambda).powi(n) * z0 + self.h_point(itinerary)
    }

    /// Image of the origin under the composed branches of `itinerary`, as the
    /// sum `(1 + λ) Σ_j (-λ)^{n-j-1} v_{i_j}`.
    pub fn h_point(&self, itinerary: &Itinerary) -> Point {
        let mut weight = 1.0;
        let mut acc = Point::zeros();
        for k in itinerary.iter().rev() {
            acc += self.polygon.vertex(k) * weight;
            weight *= -self.lambda;
        }
        acc * (1.0 + self.lambda)
    }

    pub fn trap_radii(&self, epsilon: f64) -> Result<TrapRadii> {
        if epsilon < 0.0 || self.lambda + epsilon >= 1.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "need 0 <= epsilon and lambda + epsilon < 1, got epsilon = {epsilon}"
            )));
        }
        let a = self.lambda + epsilon;
        let b = self.polygon.norm() + epsilon;
        Ok(TrapRadii {
            a,
            b,
            r: b * (1.0 + a) / ((1.0 - a) * (1.0 - a)),
        })
    }

    /// Fixed-parameter trap radii (`ε = 0`).
    pub fn trap(&self) -> TrapRadii {
        self.trap_radii(0.0).expect("lambda < 1 by construction")
    }

    /// Fixed point of `T_j ∘ T_k`: `(v_j - λ v_k) / (1 - λ)`.
    pub fn two_symbol_fixed_point(&self, k: usize, j: usize) -> Result<Point> {
        if k % self.polygon.len() == j % self.polygon.len() {
            return Err(Error::SameVertex(k));
        }
        let l = self.lambda;
        Ok((self.polygon.vertex(j) - self.polygon.vertex(k) * l) / (1.0 - l))
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.polygon.clone(), lambda)
    }
}
