//! Bounded convex polytope cut from Euclidean half-spaces, with full face
//! lattice. Shared by the hyperbolic kernel (which works in the Klein chart,
//! where geodesic planes are Euclidean planes) and the flat-torus analogue, so
//! both pipelines run the exact same combinatorial construction.
//!
//! The construction is brute force over plane triples, which is robust and
//! plenty fast for the few dozen planes a Voronoi cell sees.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Half-space {x : normal·x ≤ offset}. Normals need not be unit on input;
/// they are normalized during the cut.
#[derive(Debug, Clone, Copy)]
pub struct Halfspace {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector3<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    fn normalized(&self) -> Halfspace {
        let n = self.normal.norm();
        Halfspace {
            normal: self.normal / n,
            offset: self.offset / n,
        }
    }

    /// Signed distance of `x` to the plane (positive outside).
    #[inline]
    pub fn eval(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// A face of the lattice: the cutting plane index (into the input list) and
/// the vertex loop, counterclockwise seen from outside.
#[derive(Debug, Clone)]
pub struct PolyFace {
    pub plane: usize,
    pub vertices: Vec<usize>,
}

/// An edge shared by exactly two faces.
#[derive(Debug, Clone, Copy)]
pub struct PolyEdge {
    pub vertices: (usize, usize),
    pub faces: (usize, usize),
}

/// Vertex/edge/face lattice of a bounded convex polytope.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<PolyFace>,
    pub edges: Vec<PolyEdge>,
}

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("half-space intersection is empty")]
    Empty,
    #[error("half-space intersection is unbounded (exceeds the working box)")]
    Unbounded,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

/// Residual below which a plane counts as incident to a candidate vertex.
const TAU_ON: f64 = 1e-9;
/// Welding radius for coincident candidate vertices.
const TAU_WELD: f64 = 2e-8;

/// Intersects half-spaces into a bounded polytope with a validated lattice.
///
/// A working box of half-width `bound` is appended internally; if any box
/// facet survives into the result the intersection is reported unbounded.
/// Configurations where four or more planes pass through a common point are
/// rejected as degenerate; the caller resolves those by perturbation.
pub fn cut_polytope(planes: &[Halfspace], bound: f64) -> Result<Polytope, PolytopeError> {
    let n_input = planes.len();
    let mut all: Vec<Halfspace> = planes.iter().map(|h| h.normalized()).collect();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut n = Vector3::zeros();
            n[axis] = sign;
            all.push(Halfspace::new(n, bound));
        }
    }

    // Enumerate plane triples; keep intersection points inside all half-spaces.
    let m = all.len();
    let mut cand_pts: Vec<Vector3<f64>> = Vec::new();
    let mut cand_inc: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let a = Matrix3::from_rows(&[
                    all[i].normal.transpose(),
                    all[j].normal.transpose(),
                    all[k].normal.transpose(),
                ]);
                let b = Vector3::new(all[i].offset, all[j].offset, all[k].offset);
                let Some(x) = a.lu().solve(&b) else {
                    continue;
                };
                if (a * x - b).amax() > 1e-8 {
                    continue;
                }
                if !x.iter().all(|c| c.is_finite()) {
                    continue;
                }
                let mut inside = true;
                let mut incident = Vec::with_capacity(4);
                for (p, h) in all.iter().enumerate() {
                    let e = h.eval(&x);
                    if e > TAU_ON {
                        inside = false;
                        break;
                    }
                    if e.abs() <= TAU_ON {
                        incident.push(p);
                    }
                }
                if inside {
                    cand_pts.push(x);
                    cand_inc.push(incident);
                }
            }
        }
    }

    // Weld coincident candidates, merging incidence sets.
    let mut verts: Vec<Vector3<f64>> = Vec::new();
    let mut vert_inc: Vec<Vec<usize>> = Vec::new();
    'cand: for (p, inc) in cand_pts.iter().zip(&cand_inc) {
        for (vi, v) in verts.iter().enumerate() {
            if (p - v).norm() <= TAU_WELD {
                for &pl in inc {
                    if !vert_inc[vi].contains(&pl) {
                        vert_inc[vi].push(pl);
                    }
                }
                continue 'cand;
            }
        }
        verts.push(*p);
        vert_inc.push(inc.clone());
    }

    if verts.is_empty() {
        return Err(PolytopeError::Empty);
    }
    for (vi, inc) in vert_inc.iter().enumerate() {
        if inc.len() > 3 {
            return Err(PolytopeError::Degenerate(format!(
                "vertex {} lies on {} planes: {:?}",
                vi,
                inc.len(),
                inc
            )));
        }
    }

    // Gather faces per plane; a plane with three or more vertices carries a face.
    let mut faces: Vec<PolyFace> = Vec::new();
    for (pi, h) in all.iter().enumerate() {
        let members: Vec<usize> = (0..verts.len())
            .filter(|&vi| vert_inc[vi].contains(&pi))
            .collect();
        if members.len() < 3 {
            continue;
        }
        if pi >= n_input {
            return Err(PolytopeError::Unbounded);
        }
        faces.push(PolyFace {
            plane: pi,
            vertices: order_face_loop(h, &members, &verts)?,
        });
    }
    if faces.len() < 4 {
        return Err(PolytopeError::Degenerate(format!(
            "only {} faces; no solid intersection",
            faces.len()
        )));
    }

    // Edges from consecutive loop pairs; each must be shared by exactly 2 faces.
    let mut edge_map: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
        std::collections::BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        let n = f.vertices.len();
        for s in 0..n {
            let a = f.vertices[s];
            let b = f.vertices[(s + 1) % n];
            let key = (a.min(b), a.max(b));
            edge_map.entry(key).or_default().push(fi);
        }
    }
    let mut edges = Vec::with_capacity(edge_map.len());
    for (key, fs) in &edge_map {
        if fs.len() != 2 {
            return Err(PolytopeError::Degenerate(format!(
                "edge {:?} lies in {} faces",
                key,
                fs.len()
            )));
        }
        edges.push(PolyEdge {
            vertices: *key,
            faces: (fs[0], fs[1]),
        });
    }

    let poly = Polytope {
        vertices: verts,
        faces,
        edges,
    };
    let (v, e, f) = (poly.vertices.len(), poly.edges.len(), poly.faces.len());
    if v + f != e + 2 {
        return Err(PolytopeError::Degenerate(format!(
            "Euler check failed: V={v} E={e} F={f}"
        )));
    }
    Ok(poly)
}

/// Orders face vertices counterclockwise as seen from outside (from the tip
/// of the outward face normal). Convexity makes an angular sort sufficient.
fn order_face_loop(
    h: &Halfspace,
    members: &[usize],
    verts: &[Vector3<f64>],
) -> Result<Vec<usize>, PolytopeError> {
    let centroid: Vector3<f64> =
        members.iter().map(|&vi| verts[vi]).sum::<Vector3<f64>>() / members.len() as f64;
    let n = h.normal;
    let seed = if n[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = (seed - n * seed.dot(&n)).normalize();
    let w = n.cross(&u);
    let mut order: Vec<(f64, usize)> = members
        .iter()
        .map(|&vi| {
            let d = verts[vi] - centroid;
            (d.dot(&w).atan2(d.dot(&u)), vi)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in order.windows(2) {
        if (pair[1].0 - pair[0].0).abs() < 1e-12 {
            return Err(PolytopeError::Degenerate(
                "coincident angular positions in face loop".into(),
            ));
        }
    }
    Ok(order.into_iter().map(|(_, vi)| vi).collect())
}

impl Polytope {
    /// Euclidean volume via the divergence theorem over fan-triangulated faces.
    pub fn euclidean_volume(&self) -> f64 {
        let mut six_vol = 0.0;
        for f in &self.faces {
            let v0 = self.vertices[f.vertices[0]];
            for tri in f.vertices[1..].windows(2) {
                let v1 = self.vertices[tri[0]];
                let v2 = self.vertices[tri[1]];
                six_vol += v0.cross(&v1).dot(&v2);
            }
        }
        six_vol / 6.0
    }

    /// Whether `x` satisfies every face plane of the polytope within `tol`.
    /// Only supporting planes that carry faces are checked.
    pub fn contains(&self, planes: &[Halfspace], x: &Vector3<f64>, tol: f64) -> bool {
        self.faces
            .iter()
            .all(|f| planes[f.plane].normalized().eval(x) <= tol)
    }

    /// Largest face-plane violation over the polytope's own vertices.
    pub fn max_vertex_violation(&self, planes: &[Halfspace]) -> f64 {
        let mut worst: f64 = 0.0;
        for v in &self.vertices {
            for h in planes {
                worst = worst.max(h.normalized().eval(v));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_planes(half: f64) -> Vec<Halfspace> {
        let mut v = Vec::new();
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut n = Vector3::zeros();
                n[axis] = sign;
                v.push(Halfspace::new(n, half));
            }
        }
        v
    }

    #[test]
    fn cube_lattice() {
        let p = cut_polytope(&cube_planes(0.5), 10.0).unwrap();
        assert_eq!(p.vertices.len(), 8);
        assert_eq!(p.edges.len(), 12);
        assert_eq!(p.faces.len(), 6);
        assert!((p.euclidean_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tetrahedron_lattice() {
        // Four symmetric planes with normals toward alternating cube corners.
        let dirs = [
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let planes: Vec<Halfspace> = dirs
            .iter()
            .map(|d| Halfspace::new(d.normalize(), 0.3))
            .collect();
        let p = cut_polytope(&planes, 10.0).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.edges.len(), 6);
        assert_eq!(p.faces.len(), 4);
    }

    #[test]
    fn empty_and_unbounded_are_distinguished() {
        let n = Vector3::x();
        let contradictory = vec![Halfspace::new(n, -1.0), Halfspace::new(-n, -1.0)];
        assert!(matches!(
            cut_polytope(&contradictory, 10.0),
            Err(PolytopeError::Empty)
        ));
        let slab = vec![Halfspace::new(n, 1.0), Halfspace::new(-n, 1.0)];
        assert!(matches!(
            cut_polytope(&slab, 10.0),
            Err(PolytopeError::Unbounded)
        ));
    }

    #[test]
    fn degenerate_apex_is_reported() {
        // A square pyramid has a 4-plane vertex at the apex.
        let mut planes = vec![Halfspace::new(-Vector3::z(), 0.0)];
        for (sx, sy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let n = Vector3::new(sx, sy, 1.0).normalize();
            // Each slanted plane passes through the apex (0,0,1).
            planes.push(Halfspace::new(n, n[2]));
        }
        assert!(matches!(
            cut_polytope(&planes, 10.0),
            Err(PolytopeError::Degenerate(_))
        ));
    }

    #[test]
    fn redundant_planes_are_dropped() {
        let mut planes = cube_planes(0.5);
        planes.push(Halfspace::new(Vector3::x(), 5.0));
        let p = cut_polytope(&planes, 10.0).unwrap();
        assert_eq!(p.faces.len(), 6);
        assert!(p.faces.iter().all(|f| f.plane != 6));
    }
}
