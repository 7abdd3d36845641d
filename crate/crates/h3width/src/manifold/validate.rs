//! Structural validation of a manifold model: pairings match faces, the group
//! ball is closed and saturated, and the edge cycles of the gluing compose to
//! the identity with dihedral angles summing to 2π.

use crate::geom::{HPoint, Isometry};

use super::{ManifoldError, ManifoldModel, ValidationReport};

const FACE_MATCH_TOL: f64 = 1e-7;

/// Checks run on every assemble. Chart models (no pairings) only need the
/// interior-basepoint and group-ball checks.
pub fn validate_structure(model: &ManifoldModel) -> Result<(), ManifoldError> {
    let origin = HPoint::origin();
    for f in &model.domain.faces {
        if model.domain.halfspaces[f.plane].eval(&origin) >= -1e-6 {
            return Err(ManifoldError::Validation(
                "basepoint is not interior to the fundamental domain".into(),
            ));
        }
    }

    if model.pairings.is_empty() {
        return Ok(());
    }

    let face_of_plane = plane_to_face(model)?;

    let mut src_seen = vec![0usize; model.domain.faces.len()];
    let mut dst_seen = vec![0usize; model.domain.faces.len()];
    for (pi, p) in model.pairings.iter().enumerate() {
        let fs = face_of_plane(p.src).ok_or_else(|| {
            ManifoldError::Validation(format!("pairing {pi}: source plane {} has no face", p.src))
        })?;
        let fd = face_of_plane(p.dst).ok_or_else(|| {
            ManifoldError::Validation(format!("pairing {pi}: target plane {} has no face", p.dst))
        })?;
        src_seen[fs] += 1;
        dst_seen[fd] += 1;

        // The isometry must carry the source face onto the target face.
        let src_face = &model.domain.faces[fs];
        let dst_face = &model.domain.faces[fd];
        if src_face.vertices.len() != dst_face.vertices.len() {
            return Err(ManifoldError::Validation(format!(
                "pairing {pi}: face sizes differ ({} vs {})",
                src_face.vertices.len(),
                dst_face.vertices.len()
            )));
        }
        for &vi in &src_face.vertices {
            let img = p.iso.apply(&model.domain.vertices[vi]);
            let matched = dst_face
                .vertices
                .iter()
                .any(|&wi| model.domain.vertices[wi].distance(&img) < FACE_MATCH_TOL);
            if !matched {
                return Err(ManifoldError::Validation(format!(
                    "pairing {pi}: image of a source-face vertex misses the target face"
                )));
            }
        }
        // Outward normal of the source plane maps to the inward normal of the
        // target plane: the image copy lies across the target face.
        let img_n = p.iso.matrix() * model.domain.halfspaces[p.src].normal();
        let diff = (img_n + model.domain.halfspaces[p.dst].normal()).amax();
        if diff > 1e-7 {
            return Err(ManifoldError::Validation(format!(
                "pairing {pi}: image plane normal mismatch ({diff:.2e})"
            )));
        }
    }
    for (fi, (&s, &d)) in src_seen.iter().zip(dst_seen.iter()).enumerate() {
        if s != 1 || d != 1 {
            return Err(ManifoldError::Validation(format!(
                "face {fi} appears {s} times as source and {d} as target; expected once each"
            )));
        }
    }

    // Pairings close under inverse.
    for p in &model.pairings {
        let inv = p.iso.inverse();
        let found = model.pairings.iter().any(|q| {
            q.src == p.dst
                && q.dst == p.src
                && q.iso
                    .matrix()
                    .iter()
                    .zip(inv.matrix().iter())
                    .all(|(a, b)| (a - b).abs() < 1e-8)
        });
        if !found {
            return Err(ManifoldError::Validation(
                "pairing list is not closed under inverses".into(),
            ));
        }
    }

    // Group-ball saturation: products of ball elements with generators that
    // stay within the search radius must already be in the ball.
    for i in 0..model.group.len() {
        for p in &model.pairings {
            let prod = model.group.element(i).compose(&p.iso).renormalized();
            if prod.displacement() <= model.r_search - 1e-6 && model.group.find(&prod).is_none() {
                return Err(ManifoldError::Validation(format!(
                    "group ball is not saturated: missing product at displacement {:.4}",
                    prod.displacement()
                )));
            }
        }
    }
    Ok(())
}

/// Full validation: structure plus edge-cycle closure, for `validate` runs.
pub fn validate_full(model: &ManifoldModel) -> Result<ValidationReport, ManifoldError> {
    validate_structure(model)?;
    let cycles = if model.pairings.is_empty() {
        Vec::new()
    } else {
        check_edge_cycles(model)?
    };
    let max_defect = cycles.iter().map(|c| c.1).fold(0.0f64, f64::max);
    Ok(ValidationReport {
        faces: model.domain.faces.len(),
        pairings: model.pairings.len(),
        group_elements: model.group.len(),
        min_displacement: model.group.min_displacement().unwrap_or(f64::INFINITY),
        edge_cycles: cycles.iter().map(|c| c.0).collect(),
        max_cycle_defect: max_defect,
        volume: model.volume_estimate(),
    })
}

fn plane_to_face(model: &ManifoldModel) -> Result<impl Fn(usize) -> Option<usize> + '_, ManifoldError> {
    let map: Vec<Option<usize>> = (0..model.domain.halfspaces.len())
        .map(|pi| model.domain.faces.iter().position(|f| f.plane == pi))
        .collect();
    Ok(move |pi: usize| map.get(pi).copied().flatten())
}

/// Walks every edge cycle of the gluing. Returns (cycle length, closure
/// defect) per cycle and verifies the dihedral angles sum to 2π.
fn check_edge_cycles(model: &ManifoldModel) -> Result<Vec<(usize, f64)>, ManifoldError> {
    let dom = &model.domain;
    let face_of_plane = plane_to_face(model)?;
    let pairing_by_dst: std::collections::HashMap<usize, &super::FacePairing> = model
        .pairings
        .iter()
        .map(|p| (face_of_plane(p.dst).expect("validated above"), p))
        .collect();

    let mut visited = std::collections::HashSet::new();
    let mut cycles = Vec::new();
    for (e0, edge) in dom.edges.iter().enumerate() {
        for f0 in [edge.faces.0, edge.faces.1] {
            if visited.contains(&(e0, f0)) {
                continue;
            }
            let mut state_edge = e0;
            let mut in_face = f0;
            let mut h = Isometry::identity();
            let mut angle = 0.0;
            let mut steps = 0;
            loop {
                visited.insert((state_edge, in_face));
                angle += dom.dihedral_angle(&dom.edges[state_edge]);
                let ef = dom.edges[state_edge].faces;
                let out_face = if ef.0 == in_face { ef.1 } else { ef.0 };
                let pairing = pairing_by_dst.get(&out_face).ok_or_else(|| {
                    ManifoldError::Validation(format!("no pairing into face {out_face}"))
                })?;
                h = h.compose(&pairing.iso).renormalized();
                // Pull the edge back to the domain through the pairing.
                let gi = pairing.iso.inverse();
                let (va, vb) = dom.edges[state_edge].vertices;
                let ia = gi.apply(&dom.vertices[va]);
                let ib = gi.apply(&dom.vertices[vb]);
                state_edge = dom
                    .edges
                    .iter()
                    .position(|e| {
                        let (wa, wb) = e.vertices;
                        let (pa, pb) = (&dom.vertices[wa], &dom.vertices[wb]);
                        (pa.distance(&ia) < FACE_MATCH_TOL && pb.distance(&ib) < FACE_MATCH_TOL)
                            || (pa.distance(&ib) < FACE_MATCH_TOL
                                && pb.distance(&ia) < FACE_MATCH_TOL)
                    })
                    .ok_or_else(|| {
                        ManifoldError::Validation("edge image missing from the domain".into())
                    })?;
                in_face = face_of_plane(pairing.src).expect("validated above");
                steps += 1;
                if state_edge == e0 && in_face == f0 {
                    break;
                }
                if steps > 64 {
                    return Err(ManifoldError::Validation(
                        "edge cycle failed to close within 64 steps".into(),
                    ));
                }
            }
            // Cycle transformation must be the identity and the wedge of
            // dihedral angles must fill 2π.
            let defect = h
                .matrix()
                .iter()
                .zip(Isometry::identity().matrix().iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if defect > 1e-6 {
                return Err(ManifoldError::Validation(format!(
                    "edge cycle of length {steps} does not close (defect {defect:.2e})"
                )));
            }
            if (angle - std::f64::consts::TAU).abs() > 1e-6 {
                return Err(ManifoldError::Validation(format!(
                    "edge cycle angle sum {angle:.6} ≠ 2π"
                )));
            }
            cycles.push((steps, defect));
        }
    }
    Ok(cycles)
}
