//! Points, isometries and geodesic planes of H³ in the hyperboloid model.
//!
//! The model lives on the upper sheet of {⟨x,x⟩ = −1} in Minkowski space with
//! signature (−,+,+,+); the first coordinate is the timelike one. Distances
//! are `acosh(−⟨p,q⟩)`, totally geodesic planes are Minkowski-orthogonal
//! complements of unit spacelike vectors, and isometries are the matrices
//! preserving the form and the sheet.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::GeomError;

/// Incidence tolerance for geometric predicates, in units of the unit scale.
pub const TAU_GEOM: f64 = 1e-9;

/// Allowed normalization drift before a point or matrix is rejected.
/// Renormalization is applied after every isometry application, so drift
/// stays multiplicative rather than accumulating.
pub const TAU_NORM: f64 = 1e-12;

/// Drift tolerance for the isometry invariant ‖MᵀηM − η‖_max.
pub const TAU_ISO: f64 = 1e-9;

/// Minkowski inner product ⟨x,y⟩ = −x₀y₀ + x₁y₁ + x₂y₂ + x₃y₃.
#[inline]
pub fn mink(x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

/// Lowers an index: η·v, with η = diag(−1, 1, 1, 1).
#[inline]
fn flat(v: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(-v[0], v[1], v[2], v[3])
}

/// A point on the upper sheet of the unit hyperboloid.
///
/// Invariants: ⟨x,x⟩ = −1 within [`TAU_NORM`] and x₀ ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint(Vector4<f64>);

impl HPoint {
    /// The basepoint (1, 0, 0, 0).
    #[inline]
    pub fn origin() -> Self {
        HPoint(Vector4::new(1.0, 0.0, 0.0, 0.0))
    }

    /// Builds a point from raw coordinates, verifying the hyperboloid invariants.
    pub fn new(coords: Vector4<f64>) -> Result<Self, GeomError> {
        let drift = (mink(&coords, &coords) + 1.0).abs();
        if drift > TAU_NORM || coords[0] < 1.0 - TAU_NORM {
            return Err(GeomError::NotNormalized { drift });
        }
        Ok(HPoint(coords))
    }

    /// Projects arbitrary timelike coordinates onto the upper sheet.
    pub fn project(coords: Vector4<f64>) -> Result<Self, GeomError> {
        let q = mink(&coords, &coords);
        if q >= 0.0 {
            return Err(GeomError::NotNormalized { drift: q + 1.0 });
        }
        let mut v = coords / (-q).sqrt();
        if v[0] < 0.0 {
            v = -v;
        }
        Ok(HPoint(v))
    }

    /// The point at hyperbolic distance `r` from the origin in spatial direction `dir`.
    pub fn from_direction(dir: &Vector3<f64>, r: f64) -> Self {
        let u = dir.normalize();
        HPoint(Vector4::new(
            r.cosh(),
            r.sinh() * u[0],
            r.sinh() * u[1],
            r.sinh() * u[2],
        ))
    }

    #[inline]
    pub fn coords(&self) -> &Vector4<f64> {
        &self.0
    }

    /// Central projection to the Klein unit ball: k = (x₁,x₂,x₃)/x₀.
    /// Geodesics and geodesic planes become Euclidean lines and planes there.
    #[inline]
    pub fn klein(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3]) / self.0[0]
    }

    /// Inverse of [`HPoint::klein`]. Requires |k| < 1.
    pub fn from_klein(k: &Vector3<f64>) -> Result<Self, GeomError> {
        let n2 = k.norm_squared();
        if n2 >= 1.0 {
            return Err(GeomError::NotNormalized { drift: n2 - 1.0 });
        }
        let x0 = 1.0 / (1.0 - n2).sqrt();
        Ok(HPoint(Vector4::new(x0, x0 * k[0], x0 * k[1], x0 * k[2])))
    }

    /// Hyperbolic distance `acosh(−⟨p,q⟩)`.
    pub fn distance(&self, other: &HPoint) -> f64 {
        // Clamp: products of normalized points drift slightly above −1.
        let m = (-mink(&self.0, &other.0)).max(1.0);
        m.acosh()
    }

    /// cosh of the distance; monotone in distance and cheaper than `distance`.
    #[inline]
    pub fn cosh_distance(&self, other: &HPoint) -> f64 {
        (-mink(&self.0, &other.0)).max(1.0)
    }

    /// Geodesic midpoint.
    pub fn midpoint(&self, other: &HPoint) -> HPoint {
        HPoint::project(self.0 + other.0).expect("midpoint of hyperboloid points is timelike")
    }

    /// Point at parameter `s ∈ [0,1]` along the geodesic from `self` to `other`.
    pub fn interpolate(&self, other: &HPoint, s: f64) -> HPoint {
        let d = self.distance(other);
        if d < 1e-15 {
            return *self;
        }
        let v = self.0 * ((1.0 - s) * d).sinh() + other.0 * (s * d).sinh();
        HPoint::project(v).expect("geodesic interpolation stays timelike")
    }

    /// Unit tangent at `self` pointing toward `other`.
    pub fn direction_to(&self, other: &HPoint) -> Vector4<f64> {
        let t = other.0 + mink(&other.0, &self.0) * self.0;
        let n = mink(&t, &t).sqrt();
        t / n
    }

    /// Re-projects onto the hyperboloid, discarding accumulated drift.
    pub fn renormalized(&self) -> HPoint {
        HPoint::project(self.0).expect("renormalization of a hyperboloid point")
    }

    pub fn normalization_drift(&self) -> f64 {
        (mink(&self.0, &self.0) + 1.0).abs()
    }
}

/// A Minkowski-orthogonal transformation preserving the upper sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry(Matrix4<f64>);

impl Isometry {
    #[inline]
    pub fn identity() -> Self {
        Isometry(Matrix4::identity())
    }

    /// Wraps a matrix after verifying it preserves the form and the sheet.
    pub fn new(matrix: Matrix4<f64>) -> Result<Self, GeomError> {
        let drift = form_drift(&matrix);
        if drift > TAU_ISO {
            return Err(GeomError::NotIsometry { drift });
        }
        if matrix[(0, 0)] <= 0.0 {
            // A form-preserving matrix with m₀₀ ≤ 0 swaps the sheets.
            return Err(GeomError::NotIsometry { drift: f64::INFINITY });
        }
        Ok(Isometry(matrix))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// The hyperbolic translation carrying `a` to `b` along their geodesic.
    pub fn translation(a: &HPoint, b: &HPoint) -> Isometry {
        let (a, b) = (a.coords(), b.coords());
        let s = a + b;
        let m = Matrix4::identity() - 2.0 * b * flat(a).transpose()
            + s * flat(&s).transpose() / (1.0 - mink(a, b));
        Isometry(m)
    }

    /// Translation moving the origin by distance `d` along spatial direction `u`.
    pub fn axis_translation(u: &Vector3<f64>, d: f64) -> Isometry {
        let u = u.normalize();
        let a = Vector4::new(0.0, u[0], u[1], u[2]);
        let e0 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        // Acts as a boost on span(e₀, u), identity on the orthogonal plane.
        let m = Matrix4::identity()
            + (d.cosh() - 1.0) * (-e0 * flat(&e0).transpose() + a * flat(&a).transpose())
            + d.sinh() * (e0 * flat(&a).transpose() - a * flat(&e0).transpose());
        Isometry(m)
    }

    /// Rotation by `theta` about the spatial axis `u` through the origin.
    pub fn axis_rotation(u: &Vector3<f64>, theta: f64) -> Isometry {
        let rot = nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(*u),
            theta,
        );
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(rot.matrix());
        Isometry(m)
    }

    /// Applies the isometry and renormalizes the result.
    pub fn apply(&self, p: &HPoint) -> HPoint {
        HPoint::project(self.0 * p.coords()).expect("isometry image of a point is timelike")
    }

    /// Transforms a geodesic plane. Normals map by the same matrix since the
    /// form is preserved.
    pub fn apply_plane(&self, plane: &GeodesicPlane) -> GeodesicPlane {
        let n = self.0 * plane.normal();
        GeodesicPlane::from_normal_unchecked(n).renormalized()
    }

    /// The inverse, computed as the Minkowski adjoint η Mᵀ η.
    pub fn inverse(&self) -> Isometry {
        let m = &self.0;
        let mut inv = m.transpose();
        for i in 1..4 {
            inv[(0, i)] = -inv[(0, i)];
            inv[(i, 0)] = -inv[(i, 0)];
        }
        Isometry(inv)
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry(self.0 * other.0)
    }

    /// How far the matrix is from preserving the Minkowski form.
    pub fn form_drift(&self) -> f64 {
        form_drift(&self.0)
    }

    /// Gram–Schmidt against the Minkowski form: repairs rounding drift from
    /// long composition chains.
    pub fn renormalized(&self) -> Isometry {
        let mut cols: Vec<Vector4<f64>> = (0..4).map(|j| self.0.column(j).into_owned()).collect();
        // Column 0 is timelike, columns 1..4 spacelike.
        let q0 = -mink(&cols[0], &cols[0]);
        cols[0] /= q0.sqrt();
        if cols[0][0] < 0.0 {
            cols[0] = -cols[0];
        }
        for j in 1..4 {
            let mut v = cols[j];
            // Subtract the signed projections onto the established columns.
            v += mink(&v, &cols[0]) * cols[0];
            for k in 1..j {
                v -= mink(&v, &cols[k]) * cols[k];
            }
            cols[j] = v / mink(&v, &v).sqrt();
        }
        Isometry(Matrix4::from_columns(&cols))
    }

    /// Displacement of the basepoint, d(o, g·o).
    pub fn displacement(&self) -> f64 {
        self.0[(0, 0)].max(1.0).acosh()
    }
}

fn form_drift(m: &Matrix4<f64>) -> f64 {
    let eta = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
    let res = m.transpose() * eta * m - eta;
    res.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// A totally geodesic plane {x : ⟨x,n⟩ = 0} with unit spacelike normal `n`,
/// bounding the half-space {⟨x,n⟩ ≤ 0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPlane(Vector4<f64>);

impl GeodesicPlane {
    /// Builds a plane from a normal, verifying ⟨n,n⟩ = 1 within [`TAU_NORM`].
    pub fn new(normal: Vector4<f64>) -> Result<Self, GeomError> {
        let drift = (mink(&normal, &normal) - 1.0).abs();
        if drift > TAU_NORM {
            return Err(GeomError::NotNormalized { drift });
        }
        Ok(GeodesicPlane(normal))
    }

    pub(crate) fn from_normal_unchecked(normal: Vector4<f64>) -> Self {
        GeodesicPlane(normal)
    }

    /// Normalizes a spacelike vector into a plane normal.
    pub fn from_spacelike(v: Vector4<f64>) -> Result<Self, GeomError> {
        let q = mink(&v, &v);
        if q <= 0.0 {
            return Err(GeomError::NotNormalized { drift: q });
        }
        Ok(GeodesicPlane(v / q.sqrt()))
    }

    /// The plane at distance `r` from the origin, orthogonal to spatial
    /// direction `u`, with the origin strictly inside the half-space.
    pub fn from_pole(u: &Vector3<f64>, r: f64) -> Self {
        let u = u.normalize();
        GeodesicPlane(Vector4::new(
            r.sinh(),
            r.cosh() * u[0],
            r.cosh() * u[1],
            r.cosh() * u[2],
        ))
    }

    /// The perpendicular bisector of `p` and `q`, oriented so its half-space
    /// contains `p`.
    pub fn bisector(p: &HPoint, q: &HPoint) -> Result<Self, GeomError> {
        let v = q.coords() - p.coords();
        let n2 = mink(&v, &v);
        // ⟨q−p, q−p⟩ = 2(cosh d − 1), so this threshold is ~d² for small d.
        if n2 < TAU_GEOM * TAU_GEOM {
            return Err(GeomError::DegeneratePair);
        }
        Ok(GeodesicPlane(v / n2.sqrt()))
    }

    #[inline]
    pub fn normal(&self) -> &Vector4<f64> {
        &self.0
    }

    /// Signed incidence value ⟨x,n⟩: negative inside the half-space, zero on
    /// the plane. Equals sinh of the signed distance.
    #[inline]
    pub fn eval(&self, p: &HPoint) -> f64 {
        mink(&self.0, p.coords())
    }

    /// Distance from a point to the plane.
    pub fn distance_to(&self, p: &HPoint) -> f64 {
        self.eval(p).abs().asinh()
    }

    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        self.eval(p).abs() <= tol
    }

    /// Euclidean constraint of the plane in the Klein chart: points map to
    /// {k : a·k ≤ b} with (a, b) = (spatial normal, timelike component).
    pub fn klein_constraint(&self) -> (Vector3<f64>, f64) {
        (Vector3::new(self.0[1], self.0[2], self.0[3]), self.0[0])
    }

    fn renormalized(&self) -> GeodesicPlane {
        let q = mink(&self.0, &self.0);
        GeodesicPlane(self.0 / q.sqrt())
    }

    /// An orthonormal frame (t, a, b) of the plane with `t` timelike: plane
    /// points are t·cosh ρ + (a·cos θ + b·sin θ)·sinh ρ.
    pub fn frame(&self) -> [Vector4<f64>; 3] {
        // Start from the point of the plane closest to the origin.
        let e0 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let mut t = e0 - mink(&e0, &self.0) * self.0;
        t /= (-mink(&t, &t)).sqrt();
        if t[0] < 0.0 {
            t = -t;
        }
        let mut frame = [t, Vector4::zeros(), Vector4::zeros()];
        let mut found = 1;
        for seed in [Vector4::y(), Vector4::z(), Vector4::w(), Vector4::x()] {
            if found == 3 {
                break;
            }
            let mut v: Vector4<f64> = seed;
            v -= mink(&v, &self.0) * self.0;
            v += mink(&v, &frame[0]) * frame[0];
            for item in frame.iter().take(found).skip(1) {
                v -= mink(&v, item) * item;
            }
            let q = mink(&v, &v);
            if q > 1e-8 {
                frame[found] = v / q.sqrt();
                found += 1;
            }
        }
        assert_eq!(found, 3, "plane frame construction exhausted seeds");
        frame
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub(crate) fn random_point(rng: &mut impl rand::Rng, max_r: f64) -> HPoint {
        let d: f64 = rng.gen_range(0.0..max_r);
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let v = if v.norm() < 1e-6 { Vector3::x() } else { v };
        HPoint::from_direction(&v, d)
    }

    pub(crate) fn random_isometry(rng: &mut impl rand::Rng) -> Isometry {
        let p = random_point(rng, 1.0);
        let axis = Vector3::new(
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let axis = if axis.norm() < 1e-6 { Vector3::y() } else { axis };
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        Isometry::translation(&HPoint::origin(), &p)
            .compose(&Isometry::axis_rotation(&axis, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::{random_isometry, random_point};
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distance_identity_and_constructed() {
        let o = HPoint::origin();
        assert_eq!(o.distance(&o), 0.0);
        let q = HPoint::new(Vector4::new(1.0f64.cosh(), 1.0f64.sinh(), 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(o.distance(&q), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_symmetric_on_random_pairs() {
        let mut rng = crate::space::test_rng(7);
        for _ in 0..50 {
            let p = random_point(&mut rng, 2.0);
            let q = random_point(&mut rng, 2.0);
            assert_abs_diff_eq!(p.distance(&q), q.distance(&p), epsilon = TAU_GEOM);
        }
    }

    #[test]
    fn isometries_preserve_distance() {
        let mut rng = crate::space::test_rng(11);
        for _ in 0..30 {
            let p = random_point(&mut rng, 1.5);
            let q = random_point(&mut rng, 1.5);
            let g = random_isometry(&mut rng);
            assert_abs_diff_eq!(
                g.apply(&p).distance(&g.apply(&q)),
                p.distance(&q),
                epsilon = TAU_GEOM
            );
        }
    }

    #[test]
    fn translation_carries_endpoint() {
        let mut rng = crate::space::test_rng(13);
        for _ in 0..20 {
            let a = random_point(&mut rng, 1.2);
            let b = random_point(&mut rng, 1.2);
            let t = Isometry::translation(&a, &b);
            assert!(t.form_drift() < 1e-10);
            assert!(t.apply(&a).distance(&b) < 1e-6);
        }
    }

    #[test]
    fn axis_translation_matches_general_translation() {
        let u = Vector3::new(0.3, -0.4, 0.5);
        let d = 0.9;
        let t = Isometry::axis_translation(&u, d);
        let target = HPoint::from_direction(&u, d);
        assert!(t.apply(&HPoint::origin()).distance(&target) < 1e-7);
        let t2 = Isometry::translation(&HPoint::origin(), &target);
        for (a, b) in t.matrix().iter().zip(t2.matrix().iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = crate::space::test_rng(17);
        let g = random_isometry(&mut rng);
        let gi = g.inverse();
        let id = g.compose(&gi);
        let eye = Matrix4::<f64>::identity();
        assert!(id
            .matrix()
            .iter()
            .zip(eye.iter())
            .all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn renormalized_repairs_drift() {
        let mut rng = crate::space::test_rng(19);
        let mut g = random_isometry(&mut rng);
        // Accumulate drift by repeated composition without repair.
        let step = random_isometry(&mut rng);
        for _ in 0..10 {
            g = Isometry(g.0 * step.0);
        }
        let repaired = g.renormalized();
        assert!(repaired.form_drift() < 1e-10);
        // The repaired matrix stays close to the drifted one.
        for (a, b) in g.matrix().iter().zip(repaired.matrix().iter()) {
            assert!((a - b).abs() < 1e-6 * g.matrix().amax());
        }
    }

    #[test]
    fn bisector_symmetry_example() {
        let p = HPoint::new(Vector4::new(1.0f64.cosh(), 1.0f64.sinh(), 0.0, 0.0)).unwrap();
        let q = HPoint::new(Vector4::new(1.0f64.cosh(), -(1.0f64.sinh()), 0.0, 0.0)).unwrap();
        let b = GeodesicPlane::bisector(&p, &q).unwrap();
        // Plane through the origin with normal ∝ (0, ∓1, 0, 0); contains p side.
        assert!(b.contains(&HPoint::origin(), TAU_GEOM));
        assert!(b.eval(&p) < 0.0);
        assert!(b.eval(&q) > 0.0);
        assert_abs_diff_eq!(b.normal()[1].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bisector_contains_midpoint_and_rejects_degenerate() {
        let mut rng = crate::space::test_rng(23);
        for _ in 0..20 {
            let p = random_point(&mut rng, 1.5);
            let q = random_point(&mut rng, 1.5);
            let b = GeodesicPlane::bisector(&p, &q).unwrap();
            assert!(b.contains(&p.midpoint(&q), TAU_GEOM));
        }
        let p = random_point(&mut rng, 1.0);
        assert!(matches!(
            GeodesicPlane::bisector(&p, &p),
            Err(GeomError::DegeneratePair)
        ));
    }

    #[test]
    fn bisector_points_equidistant_by_sampling() {
        // Rejection-sample points of the plane via its frame and check they
        // are numerically equidistant from the defining pair.
        let mut rng = crate::space::test_rng(29);
        let p = random_point(&mut rng, 1.0);
        let q = random_point(&mut rng, 1.0);
        let b = GeodesicPlane::bisector(&p, &q).unwrap();
        let [t, a1, a2] = b.frame();
        use rand::Rng;
        for _ in 0..200 {
            let rho: f64 = rng.gen_range(0.0..1.5);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = HPoint::project(
                t * rho.cosh() + (a1 * th.cos() + a2 * th.sin()) * rho.sinh(),
            )
            .unwrap();
            assert!(b.contains(&x, 1e-7 * rho.cosh()));
            assert!((x.distance(&p) - x.distance(&q)).abs() <= 1e-7 * rho.cosh());
        }
    }

    #[test]
    fn klein_round_trip() {
        let mut rng = crate::space::test_rng(31);
        for _ in 0..30 {
            let p = random_point(&mut rng, 2.5);
            let back = HPoint::from_klein(&p.klein()).unwrap();
            assert!(p.distance(&back) < 1e-6);
        }
    }
}
