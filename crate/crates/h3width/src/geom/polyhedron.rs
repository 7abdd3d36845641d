//! Convex polyhedra in H³ as half-space intersections, computed in the Klein
//! chart where geodesic planes are Euclidean planes.

use nalgebra::Vector3;
use rand::Rng;

use super::polytope::{cut_polytope, Halfspace, PolyEdge, PolyFace, Polytope, PolytopeError};
use super::{GeodesicPlane, GeomError, HPoint};

/// Klein-chart working box half-width; hyperbolic radius ≈ 7.6. Intersections
/// reaching past it are reported unbounded.
const KLEIN_BOUND: f64 = 0.9999995;

/// A bounded convex polyhedron in H³ with its full face lattice.
///
/// `faces[i].plane` indexes into `halfspaces` (the input list); redundant
/// input planes carry no face. The Klein-chart polytope is retained for
/// sampling and point-membership queries.
#[derive(Debug, Clone)]
pub struct ConvexPolyhedron {
    pub halfspaces: Vec<GeodesicPlane>,
    pub vertices: Vec<HPoint>,
    pub faces: Vec<PolyFace>,
    pub edges: Vec<PolyEdge>,
    klein: Polytope,
    klein_planes: Vec<Halfspace>,
}

/// Intersects hyperbolic half-spaces {⟨x,n⟩ ≤ 0} into a polyhedron.
///
/// Fails with a structured error when the intersection is empty, unbounded,
/// or in degenerate position (four planes through a point); degeneracies are
/// resolved by caller-driven perturbation, never internally.
pub fn intersect_halfspaces(planes: &[GeodesicPlane]) -> Result<ConvexPolyhedron, GeomError> {
    let klein_planes: Vec<Halfspace> = planes
        .iter()
        .map(|p| {
            let (n, c) = p.klein_constraint();
            Halfspace::new(n, c)
        })
        .collect();
    let poly = cut_polytope(&klein_planes, KLEIN_BOUND).map_err(|e| match e {
        PolytopeError::Empty => GeomError::EmptyIntersection,
        PolytopeError::Unbounded => GeomError::UnboundedIntersection,
        PolytopeError::Degenerate(msg) => GeomError::DegenerateIntersection(msg),
    })?;
    let vertices = poly
        .vertices
        .iter()
        .map(HPoint::from_klein)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvexPolyhedron {
        halfspaces: planes.to_vec(),
        vertices,
        faces: poly.faces.clone(),
        edges: poly.edges.clone(),
        klein_planes,
        klein: poly,
    })
}

impl ConvexPolyhedron {
    /// Whether the point satisfies every supporting half-space within `tol`
    /// (in sinh-of-distance units, ≈ distance near the planes).
    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        self.faces
            .iter()
            .all(|f| self.halfspaces[f.plane].eval(p) <= tol)
    }

    /// Largest half-space violation across the stored vertices; a lattice
    /// consistency measure used by validation.
    pub fn max_vertex_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for v in &self.vertices {
            for h in &self.halfspaces {
                worst = worst.max(h.eval(v));
            }
        }
        worst
    }

    /// Maximum distance from `p` to a vertex.
    pub fn circumradius_from(&self, p: &HPoint) -> f64 {
        self.vertices
            .iter()
            .map(|v| p.distance(v))
            .fold(0.0, f64::max)
    }

    /// Interior dihedral angle along an edge, from the two face normals.
    pub fn dihedral_angle(&self, edge: &PolyEdge) -> f64 {
        let n1 = self.halfspaces[self.faces[edge.faces.0].plane].normal();
        let n2 = self.halfspaces[self.faces[edge.faces.1].plane].normal();
        (-super::minkowski::mink(n1, n2)).clamp(-1.0, 1.0).acos()
    }

    /// Hyperbolic edge length.
    pub fn edge_length(&self, edge: &PolyEdge) -> f64 {
        self.vertices[edge.vertices.0].distance(&self.vertices[edge.vertices.1])
    }

    pub fn klein_vertices(&self) -> &[Vector3<f64>] {
        &self.klein.vertices
    }

    /// Axis-aligned Klein bounding box (lo, hi).
    pub fn klein_bbox(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for v in &self.klein.vertices {
            for a in 0..3 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    fn klein_contains(&self, k: &Vector3<f64>, tol: f64) -> bool {
        self.klein.contains(&self.klein_planes, k, tol)
    }

    /// Draws a point uniformly with respect to hyperbolic volume, by
    /// rejection against the Klein volume density (1−|k|²)⁻².
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> HPoint {
        let (lo, hi) = self.klein_bbox();
        let max_norm2 = self
            .klein
            .vertices
            .iter()
            .map(|v| v.norm_squared())
            .fold(0.0, f64::max);
        // Density is maximized at the farthest vertex (convexity).
        let w_max = (1.0 - max_norm2).powi(-2);
        loop {
            let k = Vector3::new(
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
                rng.gen_range(lo[2]..hi[2]),
            );
            if !self.klein_contains(&k, 0.0) {
                continue;
            }
            let w = (1.0 - k.norm_squared()).powi(-2);
            if rng.gen_range(0.0..1.0) < w / w_max {
                return HPoint::from_klein(&k).expect("sampled Klein point inside unit ball");
            }
        }
    }

    /// Monte Carlo hyperbolic volume with one-sigma error estimate.
    pub fn volume_mc<R: Rng>(&self, n: usize, rng: &mut R) -> (f64, f64) {
        let (lo, hi) = self.klein_bbox();
        let box_vol = (hi - lo).iter().product::<f64>();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let k = Vector3::new(
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
                rng.gen_range(lo[2]..hi[2]),
            );
            let w = if self.klein_contains(&k, 0.0) {
                (1.0 - k.norm_squared()).powi(-2)
            } else {
                0.0
            };
            sum += w;
            sum_sq += w * w;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        (box_vol * mean, box_vol * (var / n as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::TAU_GEOM;
    use nalgebra::Vector3;

    #[test]
    fn symmetric_tetrahedron() {
        let dirs = [
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let planes: Vec<GeodesicPlane> =
            dirs.iter().map(|d| GeodesicPlane::from_pole(d, 0.3)).collect();
        let p = intersect_halfspaces(&planes).unwrap();
        assert_eq!(p.faces.len(), 4);
        assert_eq!(p.edges.len(), 6);
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(
            p.vertices.len() + p.faces.len(),
            p.edges.len() + 2,
            "Euler formula on the boundary sphere"
        );
        assert!(p.max_vertex_violation() <= TAU_GEOM);
    }

    #[test]
    fn cube_from_bisectors() {
        // Bisectors from the origin to six axis-aligned points at distance 1.
        let mut planes = Vec::new();
        for axis in 0..3 {
            for sign in [1.0f64, -1.0] {
                let mut dir = Vector3::zeros();
                dir[axis] = sign;
                let q = HPoint::from_direction(&dir, 1.0);
                planes.push(GeodesicPlane::bisector(&HPoint::origin(), &q).unwrap());
            }
        }
        let p = intersect_halfspaces(&planes).unwrap();
        assert_eq!(p.faces.len(), 6);
        assert_eq!(p.edges.len(), 12);
        assert_eq!(p.vertices.len(), 8);
        // All faces at distance 1/2 from the origin.
        for f in &p.faces {
            let d = p.halfspaces[f.plane].distance_to(&HPoint::origin());
            approx::assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn contradictory_planes_are_empty() {
        let n = Vector3::x();
        let planes = vec![
            GeodesicPlane::from_pole(&n, -0.5),
            GeodesicPlane::from_pole(&(-n), -0.5),
        ];
        // Each half-space excludes the origin side; the slab around the origin
        // shrinks to nothing when both offsets push outward.
        match intersect_halfspaces(&planes) {
            Err(GeomError::EmptyIntersection) | Err(GeomError::UnboundedIntersection) => {}
            other => panic!("expected structured failure, got {other:?}"),
        }
    }

    #[test]
    fn halfplane_is_unbounded() {
        let planes = vec![GeodesicPlane::from_pole(&Vector3::x(), 0.5)];
        assert!(matches!(
            intersect_halfspaces(&planes),
            Err(GeomError::UnboundedIntersection)
        ));
    }

    #[test]
    fn mc_volume_agrees_with_quadrature() {
        // Hyperbolic volume of a Klein-chart cube [-a, a]^3 by Simpson
        // quadrature of the volume density (1 - |k|^2)^-2, versus the
        // Monte Carlo estimator.
        let a: f64 = 0.45;
        let mut planes = Vec::new();
        for axis in 0..3 {
            for sign in [1.0f64, -1.0] {
                let mut dir = Vector3::zeros();
                dir[axis] = sign;
                planes.push(GeodesicPlane::from_pole(&dir, a.atanh()));
            }
        }
        let p = intersect_halfspaces(&planes).unwrap();
        let n = 60;
        let h = 2.0 * a / n as f64;
        let mut quad = 0.0;
        let weight = |i: usize| -> f64 {
            if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }
        };
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let x = -a + i as f64 * h;
                    let y = -a + j as f64 * h;
                    let z = -a + k as f64 * h;
                    let w = weight(i) * weight(j) * weight(k);
                    quad += w * (1.0 - (x * x + y * y + z * z)).powi(-2);
                }
            }
        }
        quad *= (h / 3.0).powi(3);
        let mut rng = crate::space::test_rng(5);
        let (vol, sigma) = p.volume_mc(200_000, &mut rng);
        assert!(
            (vol - quad).abs() < 3.0 * sigma + 1e-3 * quad,
            "vol={vol} quad={quad} sigma={sigma}"
        );
    }
}
