//! Outer billiards with contraction about convex polygons.
//!
//! The map `T(z) = -λ z + (1 + λ) v_k` acts on the exterior of a convex
//! polygon `P`, where `v_k` is the vertex whose cone contains `z`. This crate
//! simulates it, enumerates the continuity domains of its iterates, certifies
//! asymptotic periodicity with an explicit numeric margin, rasterizes basins
//! of attraction and implements the bounded-coefficient polynomial estimates
//! (root-free radii, transversality, sublevel measures) used to show that
//! periodicity is generic.

pub mod basins;
pub mod certification;
pub mod convex;
pub mod dynamics;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod symbolic;
pub mod transversality;

/// Planar point; the complex plane is identified with `R²`.
pub type Point = nalgebra::Vector2<f64>;

pub use certification::{
    basin_assign, certify, enumerate_attractors, BasinOutcome, CertificationResult,
    CertificationStatus, PeriodicAttractor,
};
pub use dynamics::{MapParams, OrbitResult, OrbitStatus, TrapRadii};
pub use error::{Error, Result};
pub use geometry::{ConeLocation, ConvexPolygon};
pub use symbolic::{ContinuityCell, Itinerary};
