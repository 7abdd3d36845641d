//! Thick-thin decomposition interface: Margulis-style constants and declared
//! thin tubes. Tubes are input data, never computed; a desk-mode run has an
//! empty thin part and every point is thick.

use nalgebra::Vector4;

use crate::geom::{mink, HPoint, Isometry};

use super::{ManifoldError, ManifoldModel};

/// Margulis-compatible constants. In MV mode ε = ¼·min{μ₁, δ}; in desk mode ε
/// is user-supplied and only 0 < ε < ½·inj(M) is required.
#[derive(Debug, Clone, Copy)]
pub struct MVConstants {
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl MVConstants {
    pub fn from_mv(mu: f64, mu1: f64, mu2: f64, delta: f64) -> Result<Self, ManifoldError> {
        if !(0.0 < mu1 && mu1 < mu && mu < mu2) || delta <= 0.0 {
            return Err(ManifoldError::Validation(format!(
                "MV constants must satisfy 0 < mu1 < mu < mu2 and delta > 0; got mu={mu} mu1={mu1} mu2={mu2} delta={delta}"
            )));
        }
        Ok(MVConstants {
            mu,
            mu1,
            mu2,
            delta,
            epsilon: 0.25 * mu1.min(delta),
        })
    }

    /// Desk mode: empty thin part, user-chosen ε validated against a sampled
    /// lower estimate of inj(M).
    pub fn desk(model: &ManifoldModel, epsilon: f64) -> Result<Self, ManifoldError> {
        if epsilon <= 0.0 {
            return Err(ManifoldError::Validation(
                "epsilon must be positive".into(),
            ));
        }
        let inj = model.injectivity_lower_estimate(64)?;
        if epsilon >= 0.5 * inj {
            return Err(ManifoldError::Validation(format!(
                "desk mode requires epsilon < inj(M)/2; epsilon={epsilon}, sampled inj(M) ≈ {inj:.4}"
            )));
        }
        Ok(MVConstants {
            mu: 0.0,
            mu1: 0.0,
            mu2: 0.0,
            delta: 0.0,
            epsilon,
        })
    }

    pub fn is_desk(&self) -> bool {
        self.mu == 0.0
    }
}

/// A declared Margulis tube: solid torus neighborhood of a closed geodesic,
/// given by a core segment [a, b] with b = g·a and g generating the tube's
/// cyclic group.
#[derive(Debug, Clone)]
pub struct ThinTube {
    pub core_a: HPoint,
    pub core_b: HPoint,
    pub generator: Isometry,
    pub radius: f64,
}

impl ThinTube {
    /// Unit spacelike normals spanning the orthogonal complement of the core
    /// axis; distance to the axis is asinh √(⟨x,n₁⟩² + ⟨x,n₂⟩²).
    pub fn axis_normals(&self) -> [Vector4<f64>; 2] {
        let a = self.core_a.coords();
        let t = self.core_a.direction_to(&self.core_b);
        let mut normals = [Vector4::zeros(), Vector4::zeros()];
        let mut found = 0;
        for seed in [Vector4::y(), Vector4::z(), Vector4::w(), Vector4::x()] {
            if found == 2 {
                break;
            }
            let mut v: Vector4<f64> = seed;
            v += mink(&v, a) * a;
            v -= mink(&v, &t) * t;
            for n in normals.iter().take(found) {
                v -= mink(&v, n) * n;
            }
            let q = mink(&v, &v);
            if q > 1e-8 {
                normals[found] = v / q.sqrt();
                found += 1;
            }
        }
        assert_eq!(found, 2, "axis normal construction exhausted seeds");
        normals
    }

    /// Distance from a lifted point to the axis line (in the cover).
    pub fn axis_distance(&self, p: &HPoint) -> f64 {
        let [n1, n2] = self.axis_normals();
        let s1 = mink(p.coords(), &n1);
        let s2 = mink(p.coords(), &n2);
        (s1 * s1 + s2 * s2).sqrt().asinh()
    }

    /// Translation length of the generator along the axis.
    pub fn core_length(&self) -> f64 {
        self.core_a.distance(&self.core_b)
    }

    /// Holonomy twist of the generator around its axis.
    pub fn twist_angle(&self) -> f64 {
        let [n1, n2] = self.axis_normals();
        let img = self.generator.matrix() * n1;
        let c = mink(&img, &n1);
        let s = mink(&img, &n2);
        s.atan2(c)
    }
}

/// The declared thin part.
#[derive(Debug, Clone, Default)]
pub struct ThinPart {
    pub tubes: Vec<ThinTube>,
}

impl ThinPart {
    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }

    /// Distance from a quotient point to a tube's core geodesic, minimized
    /// over deck translates.
    pub fn core_distance(&self, model: &ManifoldModel, tube: usize, p: &HPoint) -> f64 {
        let t = &self.tubes[tube];
        let d_axis_origin = t.axis_distance(&HPoint::origin());
        let dp = HPoint::origin().distance(p);
        let mut best = f64::INFINITY;
        for idx in 0..model.group.len() {
            if model.group.displacement(idx) - dp - d_axis_origin > best {
                break;
            }
            let q = model.group.element(idx).apply(p);
            best = best.min(t.axis_distance(&q));
        }
        best
    }

    /// Sampled disjointness check across tube pairs.
    pub fn check_disjoint(&self, model: &ManifoldModel, samples: usize) -> Result<(), ManifoldError> {
        let mut rng = crate::space::rng_stream(0x7183, 5);
        for i in 0..self.tubes.len() {
            for _ in 0..samples {
                let p = sample_tube_point(&self.tubes[i], &mut rng);
                for j in 0..self.tubes.len() {
                    if j != i && self.core_distance(model, j, &p) <= self.tubes[j].radius {
                        return Err(ManifoldError::Validation(format!(
                            "tubes {i} and {j} overlap at a sampled point"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn sample_tube_point(tube: &ThinTube, rng: &mut rand_chacha::ChaCha8Rng) -> HPoint {
    use rand::Rng;
    let [n1, n2] = tube.axis_normals();
    let s: f64 = rng.gen_range(0.0..1.0);
    let rho: f64 = rng.gen_range(0.0..tube.radius);
    let psi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let gamma = tube.core_a.interpolate(&tube.core_b, s);
    let v = gamma.coords() * rho.cosh() + (n1 * psi.cos() + n2 * psi.sin()) * rho.sinh();
    HPoint::project(v).expect("tube point is timelike")
}

/// Thick/thin classification of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThickThin {
    Thick,
    Thin { tube: usize },
}

/// Classifies `p` against the μ-threshold: thick iff inj ≥ μ, thin points
/// must lie in a declared tube.
pub fn classify_thick_thin(
    model: &ManifoldModel,
    thin: &ThinPart,
    mu: f64,
    p: &HPoint,
) -> Result<ThickThin, ManifoldError> {
    let inj = model.injectivity_radius_at(p)?;
    if inj >= mu {
        return Ok(ThickThin::Thick);
    }
    for (k, tube) in thin.tubes.iter().enumerate() {
        if thin.core_distance(model, k, p) <= tube.radius + crate::geom::TAU_GEOM {
            return Ok(ThickThin::Thin { tube: k });
        }
    }
    Err(ManifoldError::InconsistentThinPart { inj, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::fixtures;

    #[test]
    fn desk_mode_bounds_epsilon() {
        let m = fixtures::seifert_weber().unwrap();
        assert!(MVConstants::desk(&m, 0.2).is_ok());
        assert!(MVConstants::desk(&m, 5.0).is_err());
        assert!(MVConstants::desk(&m, 0.0).is_err());
    }

    #[test]
    fn mv_mode_derives_epsilon() {
        let c = MVConstants::from_mv(0.5, 0.4, 0.6, 0.3).unwrap();
        assert_eq!(c.epsilon, 0.075);
        assert!(MVConstants::from_mv(0.5, 0.6, 0.7, 0.3).is_err());
    }

    #[test]
    fn all_deep_mode_classifies_thick() {
        // μ below inj(M): every sampled point is thick.
        let m = fixtures::seifert_weber().unwrap();
        let thin = ThinPart::default();
        let mut rng = crate::space::test_rng(17);
        for _ in 0..40 {
            let p = m.domain.sample_uniform(&mut rng);
            assert_eq!(
                classify_thick_thin(&m, &thin, 0.2, &p).unwrap(),
                ThickThin::Thick
            );
        }
    }

    #[test]
    fn thin_point_reports_its_tube() {
        // Declare a synthetic tube along a pairing axis; points near the core
        // with inj < μ classify into it.
        let m = fixtures::seifert_weber().unwrap();
        let g = m.pairings[0].iso;
        let a = axis_point(&g);
        let b = g.apply(&a);
        let tube = ThinTube {
            core_a: a,
            core_b: b,
            generator: g,
            radius: 0.4,
        };
        let thin = ThinPart { tubes: vec![tube] };
        // Pick μ just above the injectivity radius on the axis.
        let inj_axis = m.injectivity_radius_at(&a).unwrap();
        let mu = inj_axis + 0.01;
        match classify_thick_thin(&m, &thin, mu, &a).unwrap() {
            ThickThin::Thin { tube } => assert_eq!(tube, 0),
            other => panic!("expected thin classification, got {other:?}"),
        }
        // Classification agrees with a direct injectivity threshold on samples.
        let mut rng = crate::space::test_rng(23);
        for _ in 0..30 {
            let p = m.domain.sample_uniform(&mut rng);
            let inj = m.injectivity_radius_at(&p).unwrap();
            let class = classify_thick_thin(&m, &thin, mu, &p);
            match class {
                Ok(ThickThin::Thick) => assert!(inj >= mu),
                Ok(ThickThin::Thin { .. }) => assert!(inj < mu),
                Err(ManifoldError::InconsistentThinPart { .. }) => assert!(inj < mu),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    fn axis_point(g: &Isometry) -> HPoint {
        // Coarse displacement minimization from the basepoint.
        let mut best = HPoint::origin();
        let mut best_d = best.distance(&g.apply(&best));
        let mut rng = crate::space::test_rng(29);
        for _ in 0..4000 {
            let cand = crate::geom::minkowski_test_support::random_point(&mut rng, 1.0);
            let d = cand.distance(&g.apply(&cand));
            if d < best_d {
                best_d = d;
                best = cand;
            }
        }
        best
    }
}
