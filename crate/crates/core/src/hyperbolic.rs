//! Plane hyperbolic geometry in the Poincaré disk.
//!
//! Isometries are stored as real `SL(2,ℝ)` matrices (upper half-plane
//! convention) and act on the disk through the Cayley transform
//! `w ↦ (w − i)/(w + i)`, which sends `i` to the disk center. The base point
//! `o` of every orbit construction is the disk center.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared radius beyond which a point is treated as having left the disk.
pub const DISK_LIMIT: f64 = 1.0 - 1e-12;
/// Allowed drift of `det` away from 1.
pub const DET_TOLERANCE: f64 = 1e-10;

/// A point of the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint(Complex64);

impl HPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        let n = z.norm_sqr();
        if !(n < DISK_LIMIT) {
            return Err(Error::NumericalBlowUp { norm: n.sqrt() });
        }
        Ok(HPoint(z))
    }

    pub fn origin() -> Self {
        HPoint(Complex64::new(0.0, 0.0))
    }

    /// The point at hyperbolic distance `dist` from the origin in direction `angle`.
    pub fn polar(dist: f64, angle: f64) -> Result<Self> {
        HPoint::new(Complex64::from_polar((dist / 2.0).tanh(), angle))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }

    pub fn distance(&self, other: &HPoint) -> f64 {
        distance(self.0, other.0)
    }
}

/// Hyperbolic distance between two disk points (curvature −1).
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    2.0 * (num / den).min(1.0).atanh()
}

/// `z ↦ (z − a)/(1 − āz)`, the isometry moving `a` to the origin.
fn to_origin(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// An orientation-preserving isometry: a real unimodular matrix up to sign.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MoebiusTransform {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PartialEq for MoebiusTransform {
    /// Exact entrywise equality modulo a global sign.
    fn eq(&self, other: &Self) -> bool {
        let e = self.entries();
        let f = other.entries();
        e == f || e.iter().zip(f.iter()).all(|(x, y)| *x == -*y)
    }
}

impl MoebiusTransform {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let t = MoebiusTransform { a, b, c, d };
        let det = t.det();
        if !det.is_finite() || (det - 1.0).abs() >= DET_TOLERANCE {
            return Err(Error::Precondition(format!("determinant {det} is not 1")));
        }
        Ok(t)
    }

    pub const fn identity() -> Self {
        MoebiusTransform {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        MoebiusTransform {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> Self {
        MoebiusTransform {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Largest entry magnitude; controls the absolute rounding error of products.
    pub fn scale(&self) -> f64 {
        self.entries().iter().fold(1.0f64, |m, x| m.max(x.abs()))
    }

    /// Max entrywise distance to `other`, minimized over the global sign.
    pub fn distance_mod_sign(&self, other: &Self) -> f64 {
        let e = self.entries();
        let f = other.entries();
        let plus = e.iter().zip(&f).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let minus = e.iter().zip(&f).fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance_mod_sign(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&MoebiusTransform::identity(), tol)
    }

    /// Disk coefficients `(α, β)`: the action is `z ↦ (αz + β)/(β̄z + ᾱ)`.
    pub fn disk_coefficients(&self) -> (Complex64, Complex64) {
        let alpha = Complex64::new((self.a + self.d) / 2.0, (self.b - self.c) / 2.0);
        let beta = Complex64::new((self.a - self.d) / 2.0, -(self.b + self.c) / 2.0);
        (alpha, beta)
    }

    /// Inverse of [`disk_coefficients`](Self::disk_coefficients); the pair must
    /// satisfy `|α|² − |β|² = 1`.
    pub fn from_disk_coefficients(alpha: Complex64, beta: Complex64) -> Self {
        MoebiusTransform {
            a: alpha.re + beta.re,
            b: alpha.im - beta.im,
            c: -alpha.im - beta.im,
            d: alpha.re - beta.re,
        }
    }

    /// Rotation by `angle` (counter-clockwise) about the disk center.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        MoebiusTransform::from_disk_coefficients(Complex64::new(c, s), Complex64::new(0.0, 0.0))
    }

    /// The isometry `z ↦ (z + p)/(1 + p̄z)` carrying the origin to `p`.
    pub fn from_origin_to(p: HPoint) -> Self {
        let p = p.z();
        let s = 1.0 / (1.0 - p.norm_sqr()).sqrt();
        MoebiusTransform::from_disk_coefficients(Complex64::new(s, 0.0), p * s)
    }

    /// Counter-clockwise rotation by `angle` about `center`.
    pub fn rotation_about(center: HPoint, angle: f64) -> Self {
        let m = MoebiusTransform::from_origin_to(center);
        m * MoebiusTransform::rotation(angle) * m.inverse()
    }

    /// Orientation-preserving isometry sending `p0 ↦ q0` and `p1 ↦ q1`.
    /// The two pairs must be equidistant.
    pub fn matching_segments(p0: HPoint, p1: HPoint, q0: HPoint, q1: HPoint) -> Self {
        // Normalize each segment to start at the origin along the positive axis.
        let normalize = |s: HPoint, t: HPoint| {
            let m = MoebiusTransform::from_origin_to(s).inverse();
            let t0 = m.apply_raw(t.z());
            MoebiusTransform::rotation(-t0.arg()) * m
        };
        let np = normalize(p0, p1);
        let nq = normalize(q0, q1);
        nq.inverse() * np
    }

    /// Action on a raw disk coordinate without validation.
    pub fn apply_raw(&self, z: Complex64) -> Complex64 {
        let (alpha, beta) = self.disk_coefficients();
        (alpha * z + beta) / (beta.conj() * z + alpha.conj())
    }

    pub fn apply(&self, z: HPoint) -> Result<HPoint> {
        HPoint::new(self.apply_raw(z.z()))
    }

    /// Image of the origin, `β/ᾱ`.
    pub fn orbit_point(&self) -> Result<HPoint> {
        let (alpha, beta) = self.disk_coefficients();
        HPoint::new(beta / alpha.conj())
    }

    /// Translation length `2 arcosh(|tr|/2)` (zero for elliptic elements).
    pub fn translation_length(&self) -> f64 {
        let t = self.trace().abs() / 2.0;
        if t <= 1.0 {
            0.0
        } else {
            2.0 * t.acosh()
        }
    }
}

impl Mul for MoebiusTransform {
    type Output = MoebiusTransform;

    fn mul(self, r: MoebiusTransform) -> MoebiusTransform {
        MoebiusTransform {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

impl Mul for &MoebiusTransform {
    type Output = MoebiusTransform;

    fn mul(self, r: &MoebiusTransform) -> MoebiusTransform {
        *self * *r
    }
}

impl fmt::Display for MoebiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn mobius_apply(t: &MoebiusTransform, z: HPoint) -> Result<HPoint> {
    t.apply(z)
}

/// Below this size a displacement is treated as a coincident vertex.
const COINCIDENT: f64 = 1e-14;

/// Signed angle at `at` turning from the geodesic towards `p` to the one
/// towards `q`, in `(−π, π]`. `None` if either point coincides with `at`.
fn vertex_angle(at: Complex64, p: Complex64, q: Complex64) -> Option<f64> {
    let u = to_origin(at, p);
    let v = to_origin(at, q);
    if u.norm() < COINCIDENT || v.norm() < COINCIDENT {
        return None;
    }
    Some((v * u.conj()).arg())
}

/// Signed area of the geodesic triangle `(a, b, c)` from its angle defect;
/// positive for counter-clockwise vertex order.
pub fn triangle_area_signed(a: HPoint, b: HPoint, c: HPoint) -> f64 {
    let (a, b, c) = (a.z(), b.z(), c.z());
    let (Some(alpha), Some(beta), Some(gamma)) = (
        vertex_angle(a, b, c),
        vertex_angle(b, c, a),
        vertex_angle(c, a, b),
    ) else {
        return 0.0;
    };
    let defect = PI - alpha.abs() - beta.abs() - gamma.abs();
    if defect <= 0.0 {
        return 0.0;
    }
    // Mixed signs only occur for (near-)collinear vertices.
    let orientation = alpha + beta + gamma;
    defect.copysign(orientation)
}

/// Which triangle the area cocycle measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleConvention {
    /// `Δ(o, γ₁·o, γ₁γ₂·o)`.
    #[default]
    Standard,
    /// `Δ(o, γ₁·o, γ₂⁻¹·o)`, transcribed literally; fails the cocycle identity.
    Literal,
}

/// Signed area of the geodesic triangle `(o, A·o, B·o)` given `A`, `A⁻¹B`
/// and `B`: `2(arg α_A + arg α_{A⁻¹B} − arg α_B)` reduced to `(−π, π]`.
/// Unlike the angle defect this never forms points near the boundary, so it
/// stays accurate for long words.
pub fn origin_triangle_area(a: &MoebiusTransform, a_inv_b: &MoebiusTransform, b: &MoebiusTransform) -> f64 {
    let arg = |t: &MoebiusTransform| t.disk_coefficients().0.arg();
    let raw = 2.0 * (arg(a) + arg(a_inv_b) - arg(b));
    let wrapped = raw - TAU * (raw / TAU).round();
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// The area 2-cocycle `c(γ₁, γ₂)` at the disk center.
pub fn area_cocycle(t1: &MoebiusTransform, t2: &MoebiusTransform, convention: TriangleConvention) -> Result<f64> {
    let (step, q) = match convention {
        TriangleConvention::Standard => (*t2, t1 * t2),
        TriangleConvention::Literal => {
            let q = t2.inverse();
            (t1.inverse() * q, q)
        }
    };
    t1.orbit_point()?;
    q.orbit_point()?;
    Ok(origin_triangle_area(t1, &step, &q))
}

/// The multiplier `σ_θ(γ₁, γ₂) = exp(iθ c(γ₁, γ₂))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    /// Flux in radians per unit hyperbolic area.
    pub theta: f64,
    pub convention: TriangleConvention,
}

impl Multiplier {
    pub fn new(theta: f64) -> Self {
        Multiplier {
            theta,
            convention: TriangleConvention::Standard,
        }
    }

    pub fn untwisted() -> Self {
        Multiplier::new(0.0)
    }

    /// Phase for a precomputed cocycle value.
    pub fn phase(&self, area: f64) -> Complex64 {
        if self.theta == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, self.theta * area)
        }
    }

    pub fn eval(&self, t1: &MoebiusTransform, t2: &MoebiusTransform) -> Result<Complex64> {
        Ok(self.phase(area_cocycle(t1, t2, self.convention)?))
    }
}

pub fn multiplier_eval(m: &Multiplier, t1: &MoebiusTransform, t2: &MoebiusTransform) -> Result<Complex64> {
    m.eval(t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, max_dist: f64) -> HPoint {
        HPoint::polar(rng.random_range(0.0..max_dist), rng.random_range(0.0..2.0 * PI)).unwrap()
    }

    fn random_transform(rng: &mut ChaCha8Rng) -> MoebiusTransform {
        let p = random_point(rng, 3.0);
        MoebiusTransform::from_origin_to(p) * MoebiusTransform::rotation(rng.random_range(0.0..2.0 * PI))
    }

    /// Area of a geodesic triangle by integrating the area form in polar
    /// coordinates about the first vertex.
    pub(crate) fn quadrature_area(a: HPoint, b: HPoint, c: HPoint) -> f64 {
        let to_a = MoebiusTransform::from_origin_to(a).inverse();
        let p = to_a.apply_raw(b.z());
        let q = to_a.apply_raw(c.z());
        // Walk the far side p → q by hyperbolic arc length.
        let to_p = MoebiusTransform::from_origin_to(HPoint(p));
        let q_rel = to_p.inverse().apply_raw(q);
        let len = 2.0 * q_rel.norm().atanh();
        let dir = q_rel / q_rel.norm();
        let point = |s: f64| to_p.apply_raw(dir * (s * len / 2.0).tanh());
        let integrand = |z: Complex64| {
            let r2 = z.norm_sqr();
            2.0 * r2 / (1.0 - r2)
        };
        let trapezoid = |n: usize| {
            let mut total = 0.0;
            let mut prev = point(0.0);
            for k in 1..=n {
                let cur = point(k as f64 / n as f64);
                let dt = (cur * prev.conj()).arg();
                total += 0.5 * (integrand(prev) + integrand(cur)) * dt;
                prev = cur;
            }
            total
        };
        let coarse = trapezoid(4000);
        let fine = trapezoid(8000);
        fine + (fine - coarse) / 3.0
    }

    #[test]
    fn identity_and_rotation_fix_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = random_point(&mut rng, 2.0);
        assert_eq!(MoebiusTransform::identity().apply(z).unwrap(), z);
        let r = MoebiusTransform::rotation(0.7).apply(HPoint::origin()).unwrap();
        assert!(r.z().norm() < 1e-15);
    }

    #[test]
    fn composition_matches_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let t1 = random_transform(&mut rng);
            let t2 = random_transform(&mut rng);
            let z = random_point(&mut rng, 2.0);
            let lhs = (t1 * t2).apply(z).unwrap();
            let rhs = t1.apply(t2.apply(z).unwrap()).unwrap();
            assert!((lhs.z() - rhs.z()).norm() < 1e-10);
        }
    }

    #[test]
    fn isometry_preserves_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = random_transform(&mut rng);
            let z = random_point(&mut rng, 2.0);
            let w = random_point(&mut rng, 2.0);
            let d0 = z.distance(&w);
            let d1 = t.apply(z).unwrap().distance(&t.apply(w).unwrap());
            assert!((d0 - d1).abs() < 1e-10, "{d0} vs {d1}");
        }
    }

    #[test]
    fn disk_coefficients_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let t = random_transform(&mut rng);
            assert!((t.det() - 1.0).abs() < 1e-10);
            let (al, be) = t.disk_coefficients();
            assert!((al.norm_sqr() - be.norm_sqr() - 1.0).abs() < 1e-9);
            let back = MoebiusTransform::from_disk_coefficients(al, be);
            assert!(back.approx_eq(&t, 1e-12));
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let far = HPoint::new(Complex64::new(0.999_999_999_999_9, 0.0));
        assert!(matches!(far, Err(Error::NumericalBlowUp { .. })));
        assert!(MoebiusTransform::new(2.0, 0.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn rotation_about_point_fixes_it() {
        let p = HPoint::polar(1.3, 0.4).unwrap();
        let r = MoebiusTransform::rotation_about(p, 1.1);
        assert!((r.apply(p).unwrap().z() - p.z()).norm() < 1e-14);
        assert!((r.trace().abs() - 2.0 * (0.55f64).cos()).abs() < 1e-12);
    }

    #[test]
    fn segment_matching() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p0 = random_point(&mut rng, 1.5);
        let p1 = random_point(&mut rng, 1.5);
        let t = random_transform(&mut rng);
        let q0 = t.apply(p0).unwrap();
        let q1 = t.apply(p1).unwrap();
        let m = MoebiusTransform::matching_segments(p0, p1, q0, q1);
        assert!(m.approx_eq(&t, 1e-10));
    }

    #[test]
    fn degenerate_and_antisymmetric_triangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a = random_point(&mut rng, 2.0);
            let b = random_point(&mut rng, 2.0);
            let c = random_point(&mut rng, 2.0);
            assert_eq!(triangle_area_signed(a, a, b), 0.0);
            let abc = triangle_area_signed(a, b, c);
            assert!((abc + triangle_area_signed(b, a, c)).abs() < 1e-12);
            assert!((abc - triangle_area_signed(b, c, a)).abs() < 1e-12);
            assert!(abc.abs() < PI);
        }
        // Points on a diameter.
        let a = HPoint::polar(0.5, 0.3).unwrap();
        let b = HPoint::polar(1.5, 0.3).unwrap();
        let c = HPoint::polar(0.7, 0.3 + PI).unwrap();
        assert!(triangle_area_signed(a, b, c).abs() < 1e-12);
    }

    #[test]
    fn angle_defect_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_point(&mut rng, 2.5);
            let b = random_point(&mut rng, 2.5);
            let c = random_point(&mut rng, 2.5);
            let exact = triangle_area_signed(a, b, c);
            let quad = quadrature_area(a, b, c);
            assert!((exact - quad).abs() < 1e-6, "{exact} vs {quad}");
        }
    }

    #[test]
    fn coefficient_area_matches_angle_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let a = random_transform(&mut rng);
            let b = random_transform(&mut rng);
            let defect = triangle_area_signed(HPoint::origin(), a.orbit_point().unwrap(), b.orbit_point().unwrap());
            let coeff = origin_triangle_area(&a, &(a.inverse() * b), &b);
            assert!((defect - coeff).abs() < 1e-9, "{defect} vs {coeff}");
        }
    }

    #[test]
    fn area_cocycle_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let id = MoebiusTransform::identity();
        for _ in 0..50 {
            let t = random_transform(&mut rng);
            let s = TriangleConvention::Standard;
            assert_eq!(area_cocycle(&id, &t, s).unwrap(), 0.0);
            assert_eq!(area_cocycle(&t, &id, s).unwrap(), 0.0);
            assert!(area_cocycle(&t, &t.inverse(), s).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn standard_convention_satisfies_cocycle_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut literal_worst = 0.0f64;
        for _ in 0..300 {
            let g1 = random_transform(&mut rng);
            let g2 = random_transform(&mut rng);
            let g3 = random_transform(&mut rng);
            let c = |x: &MoebiusTransform, y: &MoebiusTransform, conv| area_cocycle(x, y, conv).unwrap();
            let s = TriangleConvention::Standard;
            let lhs = c(&g1, &g2, s) + c(&(g1 * g2), &g3, s);
            let rhs = c(&g1, &(g2 * g3), s) + c(&g2, &g3, s);
            assert!((lhs - rhs).abs() < 1e-9);
            let l = TriangleConvention::Literal;
            let lhs = c(&g1, &g2, l) + c(&(g1 * g2), &g3, l);
            let rhs = c(&g1, &(g2 * g3), l) + c(&g2, &g3, l);
            literal_worst = literal_worst.max((lhs - rhs).abs());
        }
        assert!(literal_worst > 1e-3, "literal convention unexpectedly closed");
    }

    #[test]
    fn multiplier_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m0 = Multiplier::untwisted();
        let m = Multiplier::new(2.0 * PI / 5.0);
        for _ in 0..100 {
            let g1 = random_transform(&mut rng);
            let g2 = random_transform(&mut rng);
            let g3 = random_transform(&mut rng);
            assert_eq!(m0.eval(&g1, &g2).unwrap(), Complex64::new(1.0, 0.0));
            assert!((m.eval(&g1, &g2).unwrap().norm() - 1.0).abs() < 1e-15);
            assert!((m.eval(&g1, &g1.inverse()).unwrap() - 1.0).norm() < 1e-12);
            let lhs = m.eval(&g1, &g2).unwrap() * m.eval(&(g1 * g2), &g3).unwrap();
            let rhs = m.eval(&g1, &(g2 * g3)).unwrap() * m.eval(&g2, &g3).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }
}
