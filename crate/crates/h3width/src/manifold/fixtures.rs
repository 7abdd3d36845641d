//! Bundled manifold fixtures.
//!
//! The main fixture is the dodecahedral space: the regular hyperbolic
//! dodecahedron with 72° dihedral angles, opposite faces glued with a 3π/5
//! twist. Edge cycles close in classes of five (5 × 72° = 360°), making the
//! quotient a closed hyperbolic manifold. A boundary-only "chart" fixture (a
//! polyhedral ball with no pairings) supports metric tests where spheres must
//! embed.

use nalgebra::Vector3;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::geom::{intersect_halfspaces, GeodesicPlane, Isometry};

use super::{FacePairing, ManifoldError, ManifoldModel};

/// Inradius of the regular dodecahedron with 72° dihedral angle:
/// sinh²r = (cos 72° + 1/√5)/(1 − 1/√5).
pub fn dodecahedral_inradius() -> f64 {
    let c = (72.0f64).to_radians().cos();
    let s = 1.0 / 5.0f64.sqrt();
    ((c + s) / (1.0 - s)).sqrt().asinh()
}

/// Face twist of the gluing: 3π/5.
const TWIST: f64 = 3.0 * PI / 5.0;

/// Search radius shipped with the fixture; covers every in-domain metric
/// query with margin.
pub const SW_R_SEARCH: f64 = 5.2;

/// The 12 face directions (icosahedron vertices), listed so that
/// `dirs[i + 6] = -dirs[i]`.
fn face_directions() -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ];
    let mut dirs: Vec<Vector3<f64>> = raw.iter().map(|v| v.normalize()).collect();
    for i in 0..6 {
        let d = dirs[i];
        dirs.push(-d);
    }
    dirs
}

/// Builds the dodecahedral space with the default search radius.
pub fn seifert_weber() -> Result<ManifoldModel, ManifoldError> {
    seifert_weber_with_search_radius(SW_R_SEARCH)
}

pub fn seifert_weber_with_search_radius(r_search: f64) -> Result<ManifoldModel, ManifoldError> {
    seifert_weber_with_twist(TWIST, r_search)
}

/// Twist left configurable so the gluing conventions can be probed; only the
/// 3π/5 twist yields a manifold at this dihedral angle.
pub fn seifert_weber_with_twist(
    twist: f64,
    r_search: f64,
) -> Result<ManifoldModel, ManifoldError> {
    let r = dodecahedral_inradius();
    let dirs = face_directions();
    let planes: Vec<GeodesicPlane> = dirs.iter().map(|u| GeodesicPlane::from_pole(u, r)).collect();
    let domain = intersect_halfspaces(&planes)?;

    // Pairing along +u maps the face at −u onto the face at +u: translate by
    // 2r along the axis and twist. Opposite-direction entries are
    // automatically inverse to each other.
    let mut pairings = Vec::with_capacity(12);
    for (i, u) in dirs.iter().enumerate() {
        let iso = Isometry::axis_rotation(u, twist)
            .compose(&Isometry::axis_translation(u, 2.0 * r))
            .renormalized();
        let src = (i + 6) % 12;
        pairings.push(FacePairing { src, dst: i, iso });
    }

    ManifoldModel::assemble(
        "dodecahedral-space".into(),
        domain,
        pairings,
        None,
        r_search,
        Vec::new(),
    )
}

/// Shared instance for tests; the deck-ball generation is the expensive part.
pub fn seifert_weber_shared() -> &'static ManifoldModel {
    static MODEL: OnceLock<ManifoldModel> = OnceLock::new();
    MODEL.get_or_init(|| seifert_weber().expect("fixture construction"))
}

/// A polyhedral ball of the given inradius with no pairings: an H³ chart with
/// boundary, where metric spheres around interior points embed. Used by
/// level-set accuracy tests.
pub fn ball_chart(radius: f64) -> Result<ManifoldModel, ManifoldError> {
    let mut dirs = Vec::new();
    let golden = PI * (3.0 - 5.0f64.sqrt());
    for i in 0..32 {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / 32.0;
        let rho = (1.0 - z * z).sqrt();
        let th = golden * i as f64;
        dirs.push(Vector3::new(rho * th.cos(), rho * th.sin(), z));
    }
    let planes: Vec<GeodesicPlane> = dirs
        .iter()
        .map(|u| GeodesicPlane::from_pole(u, radius))
        .collect();
    let domain = intersect_halfspaces(&planes)?;
    ManifoldModel::assemble("ball-chart".into(), domain, Vec::new(), None, 0.1, Vec::new())
}
