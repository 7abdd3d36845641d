//! Compact hyperbolic 3-manifolds as fundamental polyhedra with face-pairing
//! isometries, plus the quotient metric queries the pipeline is built on:
//! quotient distance, injectivity radius, and the thick-thin interface.

mod deck;
pub mod fixtures;
mod schema;
mod thick_thin;
mod validate;

pub use deck::DeckBall;
pub use schema::ManifoldFile;
pub use thick_thin::{classify_thick_thin, MVConstants, ThinPart, ThinTube, ThickThin};

use nalgebra::Vector3;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use thiserror::Error;

use crate::geom::polytope::Halfspace;
use crate::geom::{ConvexPolyhedron, GeodesicPlane, GeomError, HPoint, Isometry};
use crate::space::{CellChart, ChartNeighbor, QuotientSpace};

#[derive(Debug, Error)]
pub enum ManifoldError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("search radius exhausted: query needs deck elements with displacement up to {needed:.4}, ball holds {available:.4}")]
    SearchRadiusExhausted { needed: f64, available: f64 },
    #[error("thin point lies in no declared tube (injectivity radius {inj:.4} < mu {mu:.4})")]
    InconsistentThinPart { inj: f64, mu: f64 },
    #[error("manifold validation failed: {0}")]
    Validation(String),
    #[error("manifold file error: {0}")]
    File(String),
}

/// A face-pairing: the isometry maps the source face onto the target face,
/// and carries the fundamental domain to its neighbor copy across the target.
#[derive(Debug, Clone)]
pub struct FacePairing {
    /// Index into the domain's half-space list.
    pub src: usize,
    pub dst: usize,
    pub iso: Isometry,
}

/// Fundamental polyhedron + face pairings + deck-group ball.
///
/// The basepoint is the origin of the hyperboloid model and must lie in the
/// domain's interior. The group ball holds every deck transformation
/// displacing the basepoint by at most `r_search`, sorted by displacement,
/// with the identity first.
#[derive(Debug)]
pub struct ManifoldModel {
    pub name: String,
    pub domain: ConvexPolyhedron,
    pub pairings: Vec<FacePairing>,
    pub group: DeckBall,
    pub r_search: f64,
    pub thin_tubes: Vec<ThinTube>,
    volume_cache: OnceLock<(f64, f64)>,
}

/// Samples used for the cached Monte Carlo volume of the fundamental domain.
const VOLUME_MC_SAMPLES: usize = 400_000;

impl ManifoldModel {
    /// Assembles a model from parts, generating the group ball by breadth-first
    /// products of the pairings when none is supplied, and validating the
    /// pairing and group-ball invariants.
    pub fn assemble(
        name: String,
        domain: ConvexPolyhedron,
        pairings: Vec<FacePairing>,
        group_ball: Option<Vec<Isometry>>,
        r_search: f64,
        thin_tubes: Vec<ThinTube>,
    ) -> Result<Self, ManifoldError> {
        let generators: Vec<Isometry> = pairings.iter().map(|p| p.iso).collect();
        let group = match group_ball {
            Some(elems) => DeckBall::from_elements(elems)?,
            None => {
                let slack = domain.circumradius_from(&HPoint::origin());
                DeckBall::generate(&generators, r_search, slack)?
            }
        };
        let model = ManifoldModel {
            name,
            domain,
            pairings,
            group,
            r_search,
            thin_tubes,
            volume_cache: OnceLock::new(),
        };
        validate::validate_structure(&model)?;
        Ok(model)
    }

    /// Default search radius: twice the domain diameter plus sweep slack.
    pub fn default_r_search(domain: &ConvexPolyhedron, epsilon_hint: f64) -> f64 {
        2.0 * (2.0 * domain.circumradius_from(&HPoint::origin())) + 8.0 * epsilon_hint
    }

    pub fn basepoint(&self) -> HPoint {
        HPoint::origin()
    }

    /// Circumradius of the fundamental domain seen from the basepoint.
    pub fn domain_radius(&self) -> f64 {
        self.domain.circumradius_from(&HPoint::origin())
    }

    /// Quotient distance: minimum of d(p, g·q) over the deck ball.
    ///
    /// Fails when the ball cannot certify the minimum, i.e. when an element
    /// beyond the search radius could still beat the best value found.
    pub fn quotient_distance(&self, p: &HPoint, q: &HPoint) -> Result<f64, ManifoldError> {
        let dp = HPoint::origin().distance(p);
        let dq = HPoint::origin().distance(q);
        let mut best_cosh = p.cosh_distance(q);
        let mut best = best_cosh.acosh();
        for idx in 1..self.group.len() {
            if self.group.displacement(idx) - dp - dq >= best {
                break;
            }
            let c = p.cosh_distance(&self.group.element(idx).apply(q));
            if c < best_cosh {
                best_cosh = c;
                best = c.acosh();
            }
        }
        // Any element outside the ball would need displacement ≤ dp + dq + best.
        if dp + dq + best > self.r_search + 1e-9 {
            return Err(ManifoldError::SearchRadiusExhausted {
                needed: dp + dq + best,
                available: self.r_search,
            });
        }
        Ok(best)
    }

    /// Injectivity radius at `p`: half the minimal displacement of `p` by a
    /// non-identity deck element. Infinite for a trivial deck group (chart
    /// fixtures without pairings).
    pub fn injectivity_radius_at(&self, p: &HPoint) -> Result<f64, ManifoldError> {
        if self.group.len() == 1 {
            return Ok(f64::INFINITY);
        }
        let dp = HPoint::origin().distance(p);
        let mut best = f64::INFINITY;
        for idx in 1..self.group.len() {
            if self.group.displacement(idx) - 2.0 * dp >= best {
                break;
            }
            best = best.min(p.distance(&self.group.element(idx).apply(p)));
        }
        if 2.0 * dp + best > self.r_search + 1e-9 {
            return Err(ManifoldError::SearchRadiusExhausted {
                needed: 2.0 * dp + best,
                available: self.r_search,
            });
        }
        Ok(best / 2.0)
    }

    /// Sampled lower estimate of inj(M): minimum over domain vertices and a
    /// seeded sample of interior points.
    pub fn injectivity_lower_estimate(&self, samples: usize) -> Result<f64, ManifoldError> {
        let mut best = f64::INFINITY;
        for v in &self.domain.vertices {
            best = best.min(self.injectivity_radius_at(v)?);
        }
        let mut rng = crate::space::rng_stream(0x1219, 77);
        for _ in 0..samples {
            let p = self.domain.sample_uniform(&mut rng);
            best = best.min(self.injectivity_radius_at(&p)?);
        }
        Ok(best)
    }

    /// Orbit points g·target with d(o, g·target) ≤ radius, sorted by that
    /// distance. The workhorse behind fast distance-field evaluation.
    pub fn point_orbit(&self, target: &HPoint, radius: f64) -> Vec<HPoint> {
        let dt = HPoint::origin().distance(target);
        let mut orbit: Vec<(f64, HPoint)> = Vec::new();
        for idx in 0..self.group.len() {
            if self.group.displacement(idx) - dt > radius {
                break;
            }
            let q = self.group.element(idx).apply(target);
            let d = HPoint::origin().distance(&q);
            if d <= radius {
                orbit.push((d, q));
            }
        }
        orbit.sort_by(|a, b| a.0.total_cmp(&b.0));
        orbit.into_iter().map(|(_, q)| q).collect()
    }

    /// Minimum distance from `p` to a sorted orbit, with radial pruning.
    pub fn distance_to_orbit(&self, p: &HPoint, orbit: &[HPoint]) -> f64 {
        let dp = p.coords()[0].max(1.0).acosh();
        let mut best_cosh = f64::INFINITY;
        let mut best = f64::INFINITY;
        for q in orbit {
            let dq = q.coords()[0].max(1.0).acosh();
            if dq - dp >= best {
                break;
            }
            let c = p.cosh_distance(q);
            if c < best_cosh {
                best_cosh = c;
                best = c.acosh();
            }
        }
        best
    }

    /// Monte Carlo volume of the fundamental domain (cached, deterministic).
    pub fn volume_estimate(&self) -> (f64, f64) {
        *self.volume_cache.get_or_init(|| {
            let mut rng = crate::space::rng_stream(0x0CEA, 3);
            self.domain.volume_mc(VOLUME_MC_SAMPLES, &mut rng)
        })
    }

    /// Structural validation: pairing/face matching, group-ball closure and
    /// saturation, and the edge-cycle condition making the quotient a
    /// manifold. Returns a human-readable report.
    pub fn validate(&self) -> Result<ValidationReport, ManifoldError> {
        validate::validate_full(self)
    }
}

/// Summary emitted by full validation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub faces: usize,
    pub pairings: usize,
    pub group_elements: usize,
    pub min_displacement: f64,
    pub edge_cycles: Vec<usize>,
    pub max_cycle_defect: f64,
    pub volume: (f64, f64),
}

impl QuotientSpace for ManifoldModel {
    type Point = HPoint;
    type Deck = usize;

    fn volume(&self) -> f64 {
        self.volume_estimate().0
    }

    fn metric_ball_volume(&self, r: f64) -> f64 {
        crate::geom::ball_volume(r).unwrap_or(0.0)
    }

    fn diameter_bound(&self) -> f64 {
        2.0 * self.domain_radius()
    }

    fn distance(&self, p: &HPoint, q: &HPoint) -> f64 {
        self.quotient_distance(p, q)
            .expect("search radius covers in-domain distance queries")
    }

    fn injectivity_radius(&self, p: &HPoint) -> f64 {
        self.injectivity_radius_at(p)
            .expect("search radius covers in-domain injectivity queries")
    }

    fn sample_domain(&self, rng: &mut ChaCha8Rng) -> HPoint {
        self.domain.sample_uniform(rng)
    }

    fn sample_ball(&self, center: &HPoint, r: f64, rng: &mut ChaCha8Rng) -> HPoint {
        use rand::Rng;
        // Radial inverse-CDF against sinh²: F(ρ) ∝ sinh(2ρ) − 2ρ.
        let total = (2.0 * r).sinh() - 2.0 * r;
        let u: f64 = rng.gen_range(0.0..1.0);
        let target = u * total;
        let (mut lo, mut hi) = (0.0f64, r);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (2.0 * mid).sinh() - 2.0 * mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let dir = crate::space::sample_direction(rng);
        let local = HPoint::from_direction(&dir, 0.5 * (lo + hi));
        Isometry::translation(&HPoint::origin(), center).apply(&local)
    }

    fn ball_multiplicity(&self, center: &HPoint, r: f64, p: &HPoint) -> usize {
        let dp = HPoint::origin().distance(p);
        let dc = HPoint::origin().distance(center);
        let mut count = 0;
        for idx in 0..self.group.len() {
            if self.group.displacement(idx) - dp - dc > r {
                break;
            }
            if p.distance(&self.group.element(idx).apply(center)) <= r {
                count += 1;
            }
        }
        count
    }

    fn deck_identity(&self) -> usize {
        0
    }

    fn deck_inverse(&self, d: usize) -> usize {
        self.group.inverse_index(d)
    }

    fn cell_chart(&self, centers: &[HPoint], i: usize, cut_radius: f64) -> CellChart<usize> {
        let xi = &centers[i];
        let to_chart = Isometry::translation(xi, &HPoint::origin());
        let di = HPoint::origin().distance(xi);
        let mut neighbors = Vec::new();
        for (j, xj) in centers.iter().enumerate() {
            let dj = HPoint::origin().distance(xj);
            for idx in 0..self.group.len() {
                if self.group.displacement(idx) - di - dj > cut_radius {
                    break;
                }
                if j == i && idx == 0 {
                    continue;
                }
                let lift = self.group.element(idx).apply(xj);
                let d = xi.distance(&lift);
                if d > cut_radius {
                    continue;
                }
                let chart_lift = to_chart.apply(&lift);
                let plane = GeodesicPlane::bisector(&HPoint::origin(), &chart_lift)
                    .expect("separated lifts give nondegenerate bisectors");
                let (n, c) = plane.klein_constraint();
                neighbors.push(ChartNeighbor {
                    center: j,
                    deck: idx,
                    plane: Halfspace::new(n, c),
                    distance: d,
                });
            }
        }
        // The cell lies within cut_radius/2 of its center once every direction
        // is cut; the box allows slack so violations surface as unbounded cuts.
        let reach = (0.5 * cut_radius).min(self.diameter_bound());
        CellChart {
            neighbors,
            seed_halfwidth: (reach * 1.1).tanh(),
        }
    }

    fn chart_point(&self, center: &HPoint, k: &Vector3<f64>) -> HPoint {
        let from_chart = Isometry::translation(&HPoint::origin(), center);
        from_chart.apply(&HPoint::from_klein(k).expect("chart vertex inside Klein ball"))
    }

    fn weld_aliases(&self, p: &HPoint) -> Vec<[f64; 3]> {
        // Canonical representatives: orbit points of minimal distance to the
        // basepoint, within a tie window comfortably above the weld tolerance.
        const TIE_WINDOW: f64 = 1e-6;
        let dp = HPoint::origin().distance(p);
        let mut best = dp;
        let mut reps: Vec<(f64, HPoint)> = vec![(dp, *p)];
        for idx in 1..self.group.len() {
            if self.group.displacement(idx) - dp > best + TIE_WINDOW {
                break;
            }
            let q = self.group.element(idx).apply(p);
            let d = HPoint::origin().distance(&q);
            if d < best {
                best = d;
            }
            if d <= best + TIE_WINDOW {
                reps.push((d, q));
            }
        }
        reps.retain(|(d, _)| *d <= best + TIE_WINDOW);
        reps.iter()
            .map(|(_, q)| [q.coords()[1], q.coords()[2], q.coords()[3]])
            .collect()
    }

    fn distance_field(&self, target: &HPoint) -> Box<dyn Fn(&HPoint) -> f64 + '_> {
        let radius = self.domain_radius() + self.diameter_bound() + 0.5;
        let orbit = self.point_orbit(target, radius);
        assert!(!orbit.is_empty(), "distance-field orbit cannot be empty");
        Box::new(move |p| self.distance_to_orbit(p, &orbit))
    }

    fn axis_field(&self, _axis: usize) -> Option<Box<dyn Fn(&HPoint) -> f64 + '_>> {
        None
    }
}
