//! Manifold description file: JSON with half-spaces, vertices, face pairings
//! (16 row-major matrix entries), optional group ball and thin tubes. Binary64
//! values survive the decimal round-trip bit-exactly.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::geom::{intersect_halfspaces, GeodesicPlane, HPoint, Isometry};

use super::{FacePairing, ManifoldError, ManifoldModel, ThinTube};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldFile {
    pub meta: Meta,
    /// Unit spacelike normals of the domain half-spaces {⟨x,n⟩ ≤ 0}.
    pub halfspaces: Vec<[f64; 4]>,
    /// Domain vertices; checked against the recomputed lattice on load.
    pub vertices: Vec<[f64; 4]>,
    pub pairings: Vec<PairingRecord>,
    pub r_search: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_ball: Option<Vec<[f64; 16]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thin_tubes: Vec<TubeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingRecord {
    /// Index into `halfspaces` of the source face plane.
    pub src: usize,
    pub dst: usize,
    /// Row-major 4×4 matrix.
    pub matrix: [f64; 16],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeRecord {
    pub core_a: [f64; 4],
    pub core_b: [f64; 4],
    pub generator: [f64; 16],
    pub radius: f64,
}

fn matrix_from_row_major(m: &[f64; 16]) -> Matrix4<f64> {
    Matrix4::from_row_slice(m)
}

fn matrix_to_row_major(m: &Matrix4<f64>) -> [f64; 16] {
    let mut out = [0.0; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[r * 4 + c] = m[(r, c)];
        }
    }
    out
}

impl ManifoldFile {
    pub fn from_model(model: &ManifoldModel) -> ManifoldFile {
        ManifoldFile {
            meta: Meta {
                name: model.name.clone(),
            },
            halfspaces: model
                .domain
                .halfspaces
                .iter()
                .map(|h| (*h.normal()).into())
                .collect(),
            vertices: model
                .domain
                .vertices
                .iter()
                .map(|v| (*v.coords()).into())
                .collect(),
            pairings: model
                .pairings
                .iter()
                .map(|p| PairingRecord {
                    src: p.src,
                    dst: p.dst,
                    matrix: matrix_to_row_major(p.iso.matrix()),
                })
                .collect(),
            r_search: model.r_search,
            group_ball: None,
            thin_tubes: model
                .thin_tubes
                .iter()
                .map(|t| TubeRecord {
                    core_a: (*t.core_a.coords()).into(),
                    core_b: (*t.core_b.coords()).into(),
                    generator: matrix_to_row_major(t.generator.matrix()),
                    radius: t.radius,
                })
                .collect(),
        }
    }

    pub fn into_model(self) -> Result<ManifoldModel, ManifoldError> {
        let planes = self
            .halfspaces
            .iter()
            .map(|n| GeodesicPlane::new(Vector4::from(*n)))
            .collect::<Result<Vec<_>, _>>()?;
        let domain = intersect_halfspaces(&planes)?;
        // Supplied vertices must match the recomputed lattice.
        if self.vertices.len() != domain.vertices.len() {
            return Err(ManifoldError::File(format!(
                "file lists {} vertices, lattice has {}",
                self.vertices.len(),
                domain.vertices.len()
            )));
        }
        for v in &self.vertices {
            let p = HPoint::new(Vector4::from(*v)).map_err(ManifoldError::Geometry)?;
            if !domain.vertices.iter().any(|w| w.distance(&p) < 1e-7) {
                return Err(ManifoldError::File(
                    "a listed vertex does not match the recomputed lattice".into(),
                ));
            }
        }
        let pairings = self
            .pairings
            .iter()
            .map(|p| {
                Ok(FacePairing {
                    src: p.src,
                    dst: p.dst,
                    iso: Isometry::new(matrix_from_row_major(&p.matrix))?,
                })
            })
            .collect::<Result<Vec<_>, ManifoldError>>()?;
        let group_ball = self
            .group_ball
            .map(|elems| {
                elems
                    .iter()
                    .map(|m| Isometry::new(matrix_from_row_major(m)).map_err(ManifoldError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let thin_tubes = self
            .thin_tubes
            .iter()
            .map(|t| {
                Ok(ThinTube {
                    core_a: HPoint::new(Vector4::from(t.core_a))?,
                    core_b: HPoint::new(Vector4::from(t.core_b))?,
                    generator: Isometry::new(matrix_from_row_major(&t.generator))?,
                    radius: t.radius,
                })
            })
            .collect::<Result<Vec<_>, ManifoldError>>()?;
        ManifoldModel::assemble(
            self.meta.name,
            domain,
            pairings,
            group_ball,
            self.r_search,
            thin_tubes,
        )
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifoldError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| ManifoldError::File(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| ManifoldError::File(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ManifoldFile, ManifoldError> {
        let text = std::fs::read_to_string(path).map_err(|e| ManifoldError::File(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| ManifoldError::File(e.to_string()))
    }
}

impl ManifoldModel {
    pub fn load(path: &Path) -> Result<ManifoldModel, ManifoldError> {
        ManifoldFile::load(path)?.into_model()
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifoldError> {
        ManifoldFile::from_model(self).save(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::fixtures;

    #[test]
    fn file_round_trip_is_bit_exact() {
        let m = fixtures::seifert_weber().unwrap();
        let file = ManifoldFile::from_model(&m);
        let text = serde_json::to_string(&file).unwrap();
        let back: ManifoldFile = serde_json::from_str(&text).unwrap();
        for (a, b) in file.halfspaces.iter().zip(back.halfspaces.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        for (a, b) in file.pairings.iter().zip(back.pairings.iter()) {
            for (x, y) in a.matrix.iter().zip(b.matrix.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn load_rebuilds_an_equivalent_model() {
        let m = fixtures::seifert_weber().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sw.json");
        m.save(&path).unwrap();
        let loaded = ManifoldModel::load(&path).unwrap();
        assert_eq!(loaded.domain.faces.len(), 12);
        assert_eq!(loaded.pairings.len(), 12);
        assert_eq!(loaded.group.len(), m.group.len());
    }
}
