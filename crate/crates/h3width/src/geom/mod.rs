//! Hyperbolic 3-space primitives in the hyperboloid model: points, isometries,
//! geodesic planes, closed-form volume/area formulas, and convex polyhedra cut
//! from half-space intersections.

mod formulas;
mod minkowski;
mod polyhedron;
pub mod polytope;

pub use formulas::{ball_volume, equatorial_disc_area, sphere_area};
pub use minkowski::{mink, GeodesicPlane, HPoint, Isometry, TAU_GEOM, TAU_NORM};
pub use polyhedron::{intersect_halfspaces, ConvexPolyhedron};

#[cfg(test)]
pub(crate) use minkowski::test_support as minkowski_test_support;

use thiserror::Error;

/// Errors raised by the geometry kernel.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point is not on the unit hyperboloid (drift {drift:.3e} exceeds tolerance)")]
    NotNormalized { drift: f64 },
    #[error("matrix does not preserve the Minkowski form (drift {drift:.3e})")]
    NotIsometry { drift: f64 },
    #[error("degenerate point pair: the two points coincide within tolerance")]
    DegeneratePair,
    #[error("negative radius {0} outside formula domain")]
    NegativeRadius(f64),
    #[error("half-space intersection is empty")]
    EmptyIntersection,
    #[error("half-space intersection is unbounded")]
    UnboundedIntersection,
    #[error("degenerate half-space configuration: {0}")]
    DegenerateIntersection(String),
}
