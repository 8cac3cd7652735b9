//! Spherical geometry kernel: unit vectors, geodesic polygons on S², arcs on
//! the equatorial circle (the n = 1 picture), polygon areas by angle excess,
//! and quadrature of the log-cosine kernel over spherical regions.
//!
//! Conventions used throughout the crate:
//! - points of the sphere are unit vectors in R³; the circle case (n = 1)
//!   lives in the plane z = 0;
//! - polygon vertices run counterclockwise as seen from outside the sphere;
//!   a two-vertex "polygon" is a counterclockwise equatorial arc;
//! - angles closer than [`MERGE_ANGLE`] are treated as coincident.

mod icosphere;
mod quad;
mod triquad;

pub use icosphere::{cell_containing, geodesic_partition, PartitionCell};
pub use quad::integrate_adaptive;
pub use triquad::integrate_triangle;

use crate::error::{Error, Result};

/// Angular separation below which two directions are merged.
pub const MERGE_ANGLE: f64 = 1e-10;

/// Surface measure of the n-sphere handled here: 2π for S¹, 4π for S².
pub fn sphere_measure(n: u32) -> f64 {
    match n {
        1 => 2.0 * std::f64::consts::PI,
        2 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported sphere dimension n = {n}"),
    }
}

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

/// Plain 3-vector. All kernels work on f64 triples; no SIMD, no generics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Triple product det[a, b, c].
pub fn det3(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.cross(b).dot(c)
}

// ---------------------------------------------------------------------------
// UnitVec
// ---------------------------------------------------------------------------

/// A point of the sphere, kept at unit Euclidean norm by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec(Vec3);

impl UnitVec {
    /// Normalizes an arbitrary vector. Errors on (near-)zero input.
    pub fn normalize(v: Vec3) -> Result<UnitVec> {
        if !v.is_finite() {
            return Err(Error::BadInstance("non-finite vector".into()));
        }
        let n = v.norm();
        if n < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(UnitVec(v * (1.0 / n)))
    }

    pub fn from_coords(x: f64, y: f64, z: f64) -> Result<UnitVec> {
        UnitVec::normalize(Vec3::new(x, y, z))
    }

    /// Point of the equatorial circle at angle `t` (the n = 1 embedding).
    pub fn from_circle_angle(t: f64) -> UnitVec {
        UnitVec(Vec3::new(t.cos(), t.sin(), 0.0))
    }

    /// Angle of an equatorial point, in (-π, π].
    pub fn circle_angle(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    pub fn on_equator(&self, tol: f64) -> bool {
        self.0.z.abs() <= tol
    }

    pub fn as_vec3(&self) -> Vec3 {
        self.0
    }

    pub fn dot(&self, o: &UnitVec) -> f64 {
        self.0.dot(o.0)
    }

    pub fn cross(&self, o: &UnitVec) -> Vec3 {
        self.0.cross(o.0)
    }

    /// Geodesic distance, numerically stable near 0 and π.
    pub fn angle_to(&self, o: &UnitVec) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub fn neg(&self) -> UnitVec {
        UnitVec(-self.0)
    }
}

/// Spec-level entry point: normalize a raw coordinate triple.
pub fn normalize(v: [f64; 3]) -> Result<UnitVec> {
    UnitVec::normalize(Vec3::from(v))
}

// ---------------------------------------------------------------------------
// Rotations (test support and sample-point decorrelation)
// ---------------------------------------------------------------------------

/// Rotation matrix, rows are the images of e₁, e₂, e₃ transposed.
#[derive(Clone, Copy, Debug)]
pub struct Rot3 {
    cols: [Vec3; 3],
}

impl Rot3 {
    pub fn identity() -> Rot3 {
        Rot3 {
            cols: [
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
        }
    }

    /// Rotation about the z axis (maps the equator to itself).
    pub fn about_z(t: f64) -> Rot3 {
        let (s, c) = t.sin_cos();
        Rot3 {
            cols: [
                Vec3::new(c, s, 0.0),
                Vec3::new(-s, c, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
        }
    }

    /// Orthonormal frame from two non-parallel directions (Gram-Schmidt).
    pub fn from_frame(a: Vec3, b: Vec3) -> Result<Rot3> {
        let u = UnitVec::normalize(a)?.as_vec3();
        let w = b - u * b.dot(u);
        let v = UnitVec::normalize(w)?.as_vec3();
        Ok(Rot3 { cols: [u, v, u.cross(v)] })
    }

    /// Uniform random rotation driven by the caller's RNG.
    pub fn random<R: rand::Rng>(rng: &mut R) -> Rot3 {
        loop {
            let g = || {
                // Box-Muller on open intervals keeps the logs finite.
                let u: f64 = rng.gen_range(1e-12..1.0);
                let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u.ln()).sqrt() * v.cos()
            };
            let a = Vec3::new(g(), g(), g());
            let b = Vec3::new(g(), g(), g());
            if let Ok(r) = Rot3::from_frame(a, b) {
                return r;
            }
        }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.cols[0] * v.x + self.cols[1] * v.y + self.cols[2] * v.z
    }

    pub fn apply_unit(&self, u: &UnitVec) -> UnitVec {
        // Rotation preserves the norm; renormalize to absorb rounding.
        UnitVec::normalize(self.apply(u.as_vec3())).expect("rotated unit vector")
    }
}

// ---------------------------------------------------------------------------
// SphericalPolygon
// ---------------------------------------------------------------------------

/// Geodesic polygon on S² (≥ 3 vertices, counterclockwise from outside) or a
/// counterclockwise equatorial arc (exactly 2 vertices, both at z = 0).
#[derive(Clone, Debug)]
pub struct SphericalPolygon {
    verts: Vec<UnitVec>,
}

impl SphericalPolygon {
    /// Builds a polygon, merging consecutive vertices closer than
    /// [`MERGE_ANGLE`] (including the wraparound pair).
    pub fn new(verts: Vec<UnitVec>) -> Result<SphericalPolygon> {
        let mut kept: Vec<UnitVec> = Vec::with_capacity(verts.len());
        for v in verts {
            match kept.last() {
                Some(last) if last.angle_to(&v) <= MERGE_ANGLE => {}
                _ => kept.push(v),
            }
        }
        while kept.len() >= 2 {
            let first = kept[0];
            let last = *kept.last().unwrap();
            if first.angle_to(&last) <= MERGE_ANGLE {
                kept.pop();
            } else {
                break;
            }
        }
        if kept.len() < 2 {
            return Err(Error::DegeneratePolygon(
                "fewer than two distinct vertices".into(),
            ));
        }
        if kept.len() == 2 {
            // Only the n = 1 degeneration is meaningful with two vertices.
            if !(kept[0].on_equator(1e-9) && kept[1].on_equator(1e-9)) {
                return Err(Error::DegeneratePolygon(
                    "two-vertex region must be an equatorial arc".into(),
                ));
            }
        }
        for pair in kept.windows(2) {
            if pair[0].cross(&pair[1]).norm() < 1e-14 {
                return Err(Error::DegeneratePolygon(
                    "antipodal consecutive vertices".into(),
                ));
            }
        }
        Ok(SphericalPolygon { verts: kept })
    }

    /// Counterclockwise equatorial arc from `a` to `b`.
    pub fn arc(a: UnitVec, b: UnitVec) -> Result<SphericalPolygon> {
        SphericalPolygon::new(vec![a, b])
    }

    pub fn vertices(&self) -> &[UnitVec] {
        &self.verts
    }

    pub fn is_arc(&self) -> bool {
        self.verts.len() == 2
    }

    /// Normalized vertex mean; interior point for convex polygons.
    pub fn center(&self) -> Result<UnitVec> {
        let mut s = Vec3::ZERO;
        for v in &self.verts {
            s = s + v.as_vec3();
        }
        UnitVec::normalize(s)
    }

    pub fn rotated(&self, r: &Rot3) -> SphericalPolygon {
        SphericalPolygon {
            verts: self.verts.iter().map(|v| r.apply_unit(v)).collect(),
        }
    }
}

/// Counterclockwise arc length from `a` to `b` on the equator, in [0, 2π).
pub fn ccw_arc_length(a: &UnitVec, b: &UnitVec) -> f64 {
    let d = b.circle_angle() - a.circle_angle();
    d.rem_euclid(std::f64::consts::TAU)
}

/// Area of a spherical polygon by angle excess (steradians), or length of an
/// equatorial arc (radians) for the two-vertex degeneration.
pub fn polygon_area(poly: &SphericalPolygon) -> Result<f64> {
    let v = poly.vertices();
    if poly.is_arc() {
        return Ok(ccw_arc_length(&v[0], &v[1]));
    }
    check_convex_ccw(v)?;
    let m = v.len();
    let mut angle_sum = 0.0;
    for k in 0..m {
        let prev = &v[(k + m - 1) % m];
        let here = &v[k];
        let next = &v[(k + 1) % m];
        angle_sum += corner_angle(prev, here, next)?;
    }
    let excess = angle_sum - (m as f64 - 2.0) * std::f64::consts::PI;
    // Tiny negative excess is rounding noise on degenerate polygons.
    Ok(excess.max(0.0))
}

/// Interior angle at `here` between the geodesics toward `prev` and `next`.
fn corner_angle(prev: &UnitVec, here: &UnitVec, next: &UnitVec) -> Result<f64> {
    let h = here.as_vec3();
    let tp = prev.as_vec3() - h * h.dot(prev.as_vec3());
    let tn = next.as_vec3() - h * h.dot(next.as_vec3());
    let (np, nn) = (tp.norm(), tn.norm());
    if np < 1e-14 || nn < 1e-14 {
        return Err(Error::DegeneratePolygon(
            "coincident or antipodal neighbors at a vertex".into(),
        ));
    }
    Ok(tp.cross(tn).norm().atan2(tp.dot(tn)))
}

/// All vertices must lie on the closed positive side of every directed edge
/// plane; rejects reflex corners and self-intersecting orderings.
fn check_convex_ccw(v: &[UnitVec]) -> Result<()> {
    let m = v.len();
    for k in 0..m {
        let a = &v[k];
        let b = &v[(k + 1) % m];
        let n = a.cross(b);
        let nn = n.norm();
        if nn < 1e-14 {
            return Err(Error::DegeneratePolygon(
                "degenerate edge (antipodal endpoints)".into(),
            ));
        }
        let n = n * (1.0 / nn);
        for w in v {
            if w.as_vec3().dot(n) < -1e-9 {
                return Err(Error::DegeneratePolygon(
                    "non-convex or misordered vertex ring".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Unsigned area of the spherical triangle abc (van Oosterom–Strackee).
/// Robust for any corner ordering; used for dual-cone sections.
pub fn spherical_triangle_area(a: &UnitVec, b: &UnitVec, c: &UnitVec) -> f64 {
    let num = det3(a.as_vec3(), b.as_vec3(), c.as_vec3()).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

// ---------------------------------------------------------------------------
// Log-cosine kernel integral
// ---------------------------------------------------------------------------

/// Dots this far below zero abort the kernel integral.
const DOT_FLOOR: f64 = -1e-14;

/// ∫ over `region` of log⟨apex, N⟩ dσ(N), to absolute tolerance `tol`.
///
/// For S² the polar antiderivative of the kernel is closed-form, so the area
/// integral reduces by Stokes to a line integral over the boundary:
/// with u = ⟨apex, N⟩ and G(u) = u − u·log u − 1, each counterclockwise edge
/// contributes ∫ G(u(t)) dφ(t), where φ is the azimuth about the apex. Along
/// a geodesic edge dφ/dt is rational in u(t), leaving one smooth 1-D
/// integrand per edge. The full-hemisphere boundary has u ≡ 0 and the
/// reduction reproduces the exact value −2π without meeting the log
/// singularity. For an equatorial arc (n = 1) the kernel is integrated
/// directly in the angle coordinate.
pub fn integrate_log_dot(apex: &UnitVec, region: &SphericalPolygon, tol: f64) -> Result<f64> {
    if region.is_arc() {
        return integrate_log_dot_arc(apex, region, tol);
    }
    let v = region.vertices();
    let m = v.len();
    let edge_tol = tol / m as f64;
    let mut total = 0.0;
    for k in 0..m {
        total += edge_term(apex, &v[k], &v[(k + 1) % m], edge_tol)?;
    }
    Ok(total)
}

/// G(u) = ∫₀^θ log(cos t) sin t dt with u = cos θ; continuous on [0, 1]
/// with G(1) = 0 and G(0⁺) = −1.
fn radial_antiderivative(u: f64) -> f64 {
    if u <= 0.0 {
        return -1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let lnu = (u - 1.0).ln_1p();
    u - u * lnu - 1.0
}

/// Boundary contribution of one geodesic edge (v1 → v2), see
/// [`integrate_log_dot`]. Errors if the edge leaves the apex's closed
/// hemisphere by more than the dot floor.
fn edge_term(apex: &UnitVec, v1: &UnitVec, v2: &UnitVec, tol: f64) -> Result<f64> {
    let cr = v1.cross(v2);
    let sin_len = cr.norm();
    if sin_len < 1e-14 {
        return Err(Error::DegeneratePolygon("zero-length edge".into()));
    }
    let len = sin_len.atan2(v1.dot(v2));
    let coeff = len * cr.dot(apex.as_vec3()) / sin_len;
    if coeff == 0.0 {
        // Edge plane contains the apex: the azimuth is constant along it.
        return Ok(0.0);
    }
    let (u1, u2) = (apex.dot(v1), apex.dot(v2));
    let (a1, a2) = (v1.as_vec3(), v2.as_vec3());
    let worst = std::cell::Cell::new(f64::INFINITY);
    let f = |t: f64| {
        let sa = ((1.0 - t) * len).sin();
        let sb = (t * len).sin();
        let u = (sa * u1 + sb * u2) / sin_len;
        if u < worst.get() {
            worst.set(u);
        }
        let u = u.clamp(0.0, 1.0);
        let denom = 1.0 - u * u;
        if denom <= 0.0 {
            // Edge point coincides with the apex: removable zero.
            return 0.0;
        }
        // Detect equator crossings via the actual point, not the clamp.
        let _ = (sa, sb, a1, a2);
        radial_antiderivative(u) / denom
    };
    let integral = integrate_adaptive(&f, 0.0, 1.0, tol / coeff.abs().max(1e-30))?;
    if worst.get() < DOT_FLOOR {
        return Err(Error::NonPositiveDot { min: worst.get() });
    }
    Ok(coeff * integral)
}

/// Direct n = 1 kernel integral over a counterclockwise equatorial arc.
fn integrate_log_dot_arc(apex: &UnitVec, region: &SphericalPolygon, tol: f64) -> Result<f64> {
    if !apex.on_equator(1e-9) {
        return Err(Error::BadInstance(
            "arc integral requires an equatorial apex".into(),
        ));
    }
    let v = region.vertices();
    let t0 = v[0].circle_angle();
    let len = ccw_arc_length(&v[0], &v[1]);
    let phase = apex.circle_angle();
    // Offsets from the apex along the arc; the kernel is log cos.
    let a = t0 - phase;
    let half_pi = std::f64::consts::FRAC_PI_2;
    // Reduce to a representative offset in (-π, π].
    let a = (a + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    let b = a + len;
    if a < -half_pi - 1e-9 || b > half_pi + 1e-9 {
        return Err(Error::NonPositiveDot {
            min: a.cos().min(b.cos()),
        });
    }
    let f = |t: f64| {
        let c = t.cos();
        if c <= 1e-300 {
            // Integrable endpoint singularity; nodes are interior so this
            // only fires on arcs that overrun the hemisphere.
            return f64::NEG_INFINITY;
        }
        c.ln()
    };
    let val = integrate_adaptive(&f, a.max(-half_pi), b.min(half_pi), tol)?;
    if !val.is_finite() {
        return Err(Error::NonPositiveDot { min: 0.0 });
    }
    Ok(val)
}
