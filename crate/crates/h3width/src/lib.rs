//! Voronoi sweep machinery for width bounds on compact hyperbolic 3-manifolds.
//!
//! The crate builds ε-regular Voronoi decompositions of a compact hyperbolic
//! 3-manifold given as a fundamental polyhedron with face pairings, orders the
//! cells by Morse-field cell splitters, extracts the polyhedral sweep surfaces
//! as normal surfaces in the dual triangulation, and evaluates the genus and
//! handle-count bounds that control the manifold's linear width.
//!
//! All hyperbolic geometry runs in the hyperboloid (Minkowski) model, where
//! bisectors are linear constraints and isometries are 4×4 matrices. Cell
//! geometry is cut in the Klein chart, where geodesic planes become Euclidean
//! planes, so the same convex-polytope kernel serves both the hyperbolic
//! pipeline and the flat-torus validation analogue.

pub mod geom;
pub mod manifold;
pub mod morse;
pub mod oracles;
pub mod pipeline;
pub mod space;
pub mod sweep;
pub mod voronoi;

pub use geom::{ConvexPolyhedron, GeodesicPlane, HPoint, Isometry};
pub use manifold::ManifoldModel;
