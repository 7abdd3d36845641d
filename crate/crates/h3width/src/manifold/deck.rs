//! Deck-transformation ball: all group elements displacing the basepoint by
//! at most the search radius, generated by breadth-first products of the face
//! pairings with matrix deduplication.

use crate::geom::{GeomError, Isometry};

use super::ManifoldError;

/// Matrix-space tolerance for identifying two representations of the same
/// deck element. Distinct elements of a discrete cocompact group differ by
/// far more at the displacements handled here.
const DEDUP_TOL: f64 = 1e-8;
/// Bucket size of the m₀₀ index used to find dedup candidates.
const BUCKET: f64 = 1e-6;

/// The deck ball, sorted by basepoint displacement with the identity first.
#[derive(Debug)]
pub struct DeckBall {
    elems: Vec<Isometry>,
    disps: Vec<f64>,
    inverses: Vec<usize>,
    index: DedupIndex,
}

impl DeckBall {
    /// Breadth-first closure of the generators, keeping every element with
    /// displacement at most `keep_radius`.
    ///
    /// Exploration continues out to `keep_radius + explore_slack`: when the
    /// generators are face pairings of a fundamental domain with circumradius
    /// at most `explore_slack`, every element of the keep ball is reachable
    /// through prefixes inside the exploration ball (a geodesic to g·o
    /// crosses a chain of domain copies whose origins stay that close to it).
    pub fn generate(
        generators: &[Isometry],
        keep_radius: f64,
        explore_slack: f64,
    ) -> Result<DeckBall, ManifoldError> {
        let explore = keep_radius + explore_slack;
        let mut index = DedupIndex::new();
        let mut elems: Vec<Isometry> = vec![Isometry::identity()];
        index.insert(&elems[0], 0);
        let mut frontier: Vec<usize> = vec![0];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &fi in &frontier {
                let base = elems[fi];
                for g in generators {
                    let prod = base.compose(g).renormalized();
                    if prod.displacement() > explore + 1e-9 {
                        continue;
                    }
                    if index.find(&prod, &elems).is_none() {
                        let id = elems.len();
                        index.insert(&prod, id);
                        elems.push(prod);
                        next.push(id);
                    }
                }
            }
            if std::env::var("H3W_DECK_DEBUG").is_ok() {
                eprintln!("bfs level: {} new, {} total", next.len(), elems.len());
            }
            frontier = next;
        }
        elems.retain(|e| e.displacement() <= keep_radius + 1e-9);
        Self::from_sorted(elems)
    }

    /// Wraps an explicitly supplied ball, checking identity membership and
    /// closure under inverses.
    pub fn from_elements(elems: Vec<Isometry>) -> Result<DeckBall, ManifoldError> {
        for e in &elems {
            if e.form_drift() > 1e-8 {
                return Err(ManifoldError::Geometry(GeomError::NotIsometry {
                    drift: e.form_drift(),
                }));
            }
        }
        Self::from_sorted(elems)
    }

    fn from_sorted(mut elems: Vec<Isometry>) -> Result<DeckBall, ManifoldError> {
        elems.sort_by(|a, b| {
            a.displacement()
                .total_cmp(&b.displacement())
                .then_with(|| {
                    for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
                        let c = x.total_cmp(y);
                        if c != std::cmp::Ordering::Equal {
                            return c;
                        }
                    }
                    std::cmp::Ordering::Equal
                })
        });
        if elems.is_empty() || elems[0].displacement() > 1e-9 {
            return Err(ManifoldError::Validation(
                "group ball does not contain the identity".into(),
            ));
        }
        let mut index = DedupIndex::new();
        for (i, e) in elems.iter().enumerate() {
            if index.find(e, &elems).is_some() {
                return Err(ManifoldError::Validation(format!(
                    "group ball contains duplicate element at index {i}"
                )));
            }
            index.insert(e, i);
        }
        let mut inverses = vec![usize::MAX; elems.len()];
        for (i, e) in elems.iter().enumerate() {
            match index.find(&e.inverse(), &elems) {
                Some(j) => inverses[i] = j,
                None => {
                    return Err(ManifoldError::Validation(format!(
                        "group ball is not closed under inverses (element {i})"
                    )))
                }
            }
        }
        let disps = elems.iter().map(|e| e.displacement()).collect();
        Ok(DeckBall {
            elems,
            disps,
            inverses,
            index,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn element(&self, idx: usize) -> &Isometry {
        &self.elems[idx]
    }

    #[inline]
    pub fn displacement(&self, idx: usize) -> f64 {
        self.disps[idx]
    }

    pub fn inverse_index(&self, idx: usize) -> usize {
        self.inverses[idx]
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elems
    }

    /// Index of the element matching `g`, if present.
    pub fn find(&self, g: &Isometry) -> Option<usize> {
        self.index.find(g, &self.elems)
    }

    /// Minimal displacement over non-identity elements; a discreteness proxy.
    pub fn min_displacement(&self) -> Option<f64> {
        self.disps.get(1).copied()
    }
}

fn matrix_close(a: &Isometry, b: &Isometry, tol: f64) -> bool {
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .all(|(x, y)| (x - y).abs() <= tol)
}

/// m₀₀-bucketed candidate index for matrix dedup.
#[derive(Debug)]
struct DedupIndex {
    buckets: std::collections::HashMap<i64, Vec<usize>>,
}

impl DedupIndex {
    fn new() -> Self {
        DedupIndex {
            buckets: std::collections::HashMap::new(),
        }
    }

    fn key(g: &Isometry) -> i64 {
        (g.matrix()[(0, 0)] / BUCKET).floor() as i64
    }

    fn insert(&mut self, g: &Isometry, id: usize) {
        self.buckets.entry(Self::key(g)).or_default().push(id);
    }

    fn find(&self, g: &Isometry, elems: &[Isometry]) -> Option<usize> {
        let k = Self::key(g);
        for key in [k - 1, k, k + 1] {
            if let Some(ids) = self.buckets.get(&key) {
                for &id in ids {
                    if matrix_close(&elems[id], g, DEDUP_TOL) {
                        return Some(id);
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    #[test]
    fn cyclic_group_ball() {
        // One translation generator: the ball along its axis is {gᵏ}.
        let step = 0.7;
        let g = Isometry::axis_translation(&Vector3::x(), step);
        let ball = DeckBall::generate(&[g, g.inverse()], 3.0, 0.1).unwrap();
        // k ∈ {-4..4}: displacement |k|·0.7 ≤ 3.0.
        assert_eq!(ball.len(), 9);
        assert_eq!(ball.displacement(0), 0.0);
        for i in 0..ball.len() {
            let inv = ball.inverse_index(i);
            let prod = ball.element(i).compose(ball.element(inv));
            assert!(prod.displacement() < 1e-5);
        }
    }

    #[test]
    fn ball_is_sorted_by_displacement() {
        // Two long perpendicular translations: within this radius only the
        // identity and the generators themselves appear.
        let g1 = Isometry::axis_translation(&Vector3::x(), 2.0);
        let g2 = Isometry::axis_translation(&Vector3::y(), 2.0);
        let ball =
            DeckBall::generate(&[g1, g1.inverse(), g2, g2.inverse()], 2.2, 0.3).unwrap();
        assert_eq!(ball.len(), 5);
        for w in ball.disps.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }
}
