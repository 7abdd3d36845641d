//! Abstraction over the two quotient geometries the pipeline runs on: the
//! hyperbolic manifold model and the flat-torus validation analogue. The
//! Voronoi and sweep layers are generic over this trait, so both geometries
//! exercise the identical combinatorial code path.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::geom::polytope::Halfspace;

/// Deterministic stream-split RNG: one master seed, one label per consumer.
pub fn rng_stream(seed: u64, label: u64) -> ChaCha8Rng {
    // splitmix64 mix so nearby labels decorrelate.
    let mut z = seed ^ label.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    rng_stream(seed, 0)
}

/// One lifted neighbor visible in a cell's chart: the bisector half-space it
/// contributes, which quotient center it is a lift of, and the deck tag
/// distinguishing the lift.
#[derive(Debug, Clone)]
pub struct ChartNeighbor<D> {
    pub center: usize,
    pub deck: D,
    pub plane: Halfspace,
    /// Distance from the cell's center to this lift.
    pub distance: f64,
}

/// Everything needed to cut one Voronoi cell in a Euclidean chart centered at
/// its center: bisector half-spaces of nearby lifts, and a half-width for the
/// working box guaranteed to contain the cell.
#[derive(Debug, Clone)]
pub struct CellChart<D> {
    pub neighbors: Vec<ChartNeighbor<D>>,
    pub seed_halfwidth: f64,
}

/// A compact quotient geometry supporting the Voronoi sweep pipeline.
pub trait QuotientSpace {
    type Point: Clone + Send + Sync + Debug;
    /// Deck-transformation tag distinguishing lifts of the same center.
    type Deck: Copy + Eq + Ord + Hash + Debug;

    fn volume(&self) -> f64;
    /// Volume of the metric ball of radius `r` in the model geometry.
    fn metric_ball_volume(&self, r: f64) -> f64;
    /// An upper bound for the quotient diameter.
    fn diameter_bound(&self) -> f64;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;
    fn injectivity_radius(&self, p: &Self::Point) -> f64;

    /// Uniform sample from the quotient with respect to volume.
    fn sample_domain(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    /// Uniform sample from the lifted metric ball B(center, r).
    fn sample_ball(&self, center: &Self::Point, r: f64, rng: &mut ChaCha8Rng) -> Self::Point;
    /// Number of lifts of `center` within distance `r` of `p`; the covering
    /// multiplicity of the projected ball at `p`.
    fn ball_multiplicity(&self, center: &Self::Point, r: f64, p: &Self::Point) -> usize;

    fn deck_identity(&self) -> Self::Deck;
    fn deck_inverse(&self, d: Self::Deck) -> Self::Deck;

    /// Chart of the cell around `centers[i]`: bisector half-spaces toward all
    /// lifts of all centers within `cut_radius` of the center.
    fn cell_chart(
        &self,
        centers: &[Self::Point],
        i: usize,
        cut_radius: f64,
    ) -> CellChart<Self::Deck>;

    /// Maps chart coordinates of cell `i` back to a quotient point.
    fn chart_point(&self, center: &Self::Point, k: &Vector3<f64>) -> Self::Point;

    /// Welding aliases of a quotient point: canonical coordinate triples such
    /// that two points are equal in the quotient iff some alias pair matches
    /// within the welding tolerance.
    fn weld_aliases(&self, p: &Self::Point) -> Vec<[f64; 3]>;

    /// Evaluator of the distance field p ↦ d(p, target).
    fn distance_field(&self, target: &Self::Point) -> Box<dyn Fn(&Self::Point) -> f64 + '_>;

    /// Distance to the coordinate slice {x_axis = 0}, where the geometry has
    /// one (the torus); `None` otherwise.
    fn axis_field(&self, axis: usize) -> Option<Box<dyn Fn(&Self::Point) -> f64 + '_>>;
}

/// Welds nearby points into quotient vertex ids using alias coordinate lists.
///
/// Two inserted points receive the same id iff some pair of their aliases lies
/// within `tol`. Conflicting matches (one point matching two established ids)
/// are reported, since they signal a degeneracy at the welding scale.
pub struct PointWelder {
    tol: f64,
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
    aliases: Vec<Vec<[f64; 3]>>,
}

impl PointWelder {
    pub fn new(tol: f64) -> Self {
        PointWelder {
            tol,
            cell: tol.max(1e-12) * 4.0,
            buckets: HashMap::new(),
            aliases: Vec::new(),
        }
    }

    fn bucket_of(&self, c: &[f64; 3]) -> (i64, i64, i64) {
        (
            (c[0] / self.cell).floor() as i64,
            (c[1] / self.cell).floor() as i64,
            (c[2] / self.cell).floor() as i64,
        )
    }

    fn matches(&self, id: usize, aliases: &[[f64; 3]]) -> bool {
        self.aliases[id].iter().any(|a| {
            aliases.iter().any(|b| {
                (a[0] - b[0]).abs() <= self.tol
                    && (a[1] - b[1]).abs() <= self.tol
                    && (a[2] - b[2]).abs() <= self.tol
            })
        })
    }

    /// Find-or-insert; returns the welded id, or an error when the aliases
    /// match more than one existing id.
    pub fn insert(&mut self, aliases: Vec<[f64; 3]>) -> Result<usize, WeldConflict> {
        let mut found: Option<usize> = None;
        let mut checked: Vec<usize> = Vec::new();
        for a in &aliases {
            let (bx, by, bz) = self.bucket_of(a);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(ids) = self.buckets.get(&(bx + dx, by + dy, bz + dz)) else {
                            continue;
                        };
                        for &id in ids {
                            if checked.contains(&id) {
                                continue;
                            }
                            checked.push(id);
                            if self.matches(id, &aliases) {
                                match found {
                                    None => found = Some(id),
                                    Some(prev) if prev != id => {
                                        return Err(WeldConflict { a: prev, b: id })
                                    }
                                    _ => {}
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(id) = found {
            return Ok(id);
        }
        let id = self.aliases.len();
        for a in &aliases {
            let key = self.bucket_of(a);
            self.buckets.entry(key).or_default().push(id);
        }
        self.aliases.push(aliases);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.aliases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aliases.is_empty()
    }

    /// Lexicographically smallest alias of an id; a deterministic
    /// representative position.
    pub fn representative(&self, id: usize) -> [f64; 3] {
        let mut best = self.aliases[id][0];
        for a in &self.aliases[id][1..] {
            if lex_less(a, &best) {
                best = *a;
            }
        }
        best
    }
}

fn lex_less(a: &[f64; 3], b: &[f64; 3]) -> bool {
    for i in 0..3 {
        if (a[i] - b[i]).abs() > 1e-9 {
            return a[i] < b[i];
        }
    }
    false
}

#[derive(Debug, thiserror::Error)]
#[error("welding conflict: point matches distinct ids {a} and {b}")]
pub struct WeldConflict {
    pub a: usize,
    pub b: usize,
}

/// Draws a uniform point of the Euclidean unit ball.
pub fn sample_unit_ball(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm_squared() < 1.0 {
            return v;
        }
    }
}

/// Draws a uniform direction on the unit sphere.
pub fn sample_direction(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = sample_unit_ball(rng);
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}
