//! M-weighted points: vectors of ℝ⁴ with the Minkowski product
//! `ξ∗ζ = ξ¹ζ¹ + ξ²ζ² + ξ³ζ³ − ξ⁴ζ⁴`, their projection to weighted points of
//! the plane, the circle predicates read off the normalized product, and the
//! Lorentz (Möbius) action.
//!
//! Orientation: the canonical lift of the unit circle is `(0,0,−1,0)`.
//! [`U`] is its negation and only appears in boundary-condition checks.

use nalgebra::{Matrix4, Vector4};

use crate::error::GeometryError;

/// Relative tolerance for nullity and Lorentz defects.
pub const NULL_TOL: f64 = 1e-12;
/// Normalized products within this distance of ±1 are clamped before `acos`.
pub const CLAMP_TOL: f64 = 1e-12;

/// The Minkowski metric `diag(1, 1, 1, −1)`.
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0))
}

/// A vector of ℝ⁴ standing for a circle, point, or imaginary circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPoint {
    pub xi: [f64; 4],
}

/// The unit disk as an M-weighted point, `(0,0,1,0)`. Not proper.
pub const U: MPoint = MPoint { xi: [0.0, 0.0, 1.0, 0.0] };

impl MPoint {
    pub const fn new(xi: [f64; 4]) -> Self {
        MPoint { xi }
    }

    /// `ξ⁴ − ξ³`, positive exactly on ℝ⁴_⊥.
    pub fn height(&self) -> f64 {
        self.xi[3] - self.xi[2]
    }

    pub fn is_proper(&self) -> bool {
        self.height() > 0.0
    }

    pub fn norm_sq(&self) -> f64 {
        mprod(self, self)
    }

    fn max_abs(&self) -> f64 {
        self.xi.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `ξ∗ξ = 0` up to [`NULL_TOL`] relative to the squared max-norm.
    pub fn is_null(&self) -> bool {
        let scale = self.max_abs();
        self.norm_sq().abs() <= NULL_TOL * scale * scale
    }

    pub fn scale(&self, s: f64) -> MPoint {
        MPoint::new(self.xi.map(|x| x * s))
    }

    pub fn neg(&self) -> MPoint {
        self.scale(-1.0)
    }

    fn check_proper(&self) -> Result<f64, GeometryError> {
        let h = self.height();
        if h > 0.0 && h.is_finite() {
            Ok(h)
        } else {
            Err(GeometryError::NotProper(h))
        }
    }

    pub(crate) fn to_vector(self) -> Vector4<f64> {
        Vector4::from(self.xi)
    }

    pub(crate) fn from_vector(v: &Vector4<f64>) -> MPoint {
        MPoint::new([v[0], v[1], v[2], v[3]])
    }
}

/// A point of the plane with a (possibly negative) weight; for `w ≥ 0` the
/// circle of radius `√w` around `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub p: [f64; 2],
    pub w: f64,
}

impl WeightedPoint {
    pub fn new(p: [f64; 2], w: f64) -> Self {
        WeightedPoint { p, w }
    }

    /// Radius of the circle, `None` for negative weight.
    pub fn radius(&self) -> Option<f64> {
        (self.w >= 0.0).then(|| self.w.sqrt())
    }
}

pub fn mprod(xi: &MPoint, zeta: &MPoint) -> f64 {
    let (a, b) = (&xi.xi, &zeta.xi);
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// `p(ξ) = (ξ¹, ξ²)/(ξ⁴−ξ³)`, `W(ξ) = ξ∗ξ/(ξ⁴−ξ³)²`.
pub fn project(xi: &MPoint) -> Result<WeightedPoint, GeometryError> {
    let h = xi.check_proper()?;
    Ok(WeightedPoint {
        p: [xi.xi[0] / h, xi.xi[1] / h],
        w: xi.norm_sq() / (h * h),
    })
}

/// The preimage of `wp` normalized to `ξ⁴ − ξ³ = 1`.
pub fn canonical_lift(wp: &WeightedPoint) -> MPoint {
    let [x, y] = wp.p;
    let r2 = x * x + y * y - wp.w;
    MPoint::new([x, y, 0.5 * (r2 - 1.0), 0.5 * (r2 + 1.0)])
}

/// `|p(ξ) − p(ζ)|²` computed in Minkowski space.
pub fn point_separation_sq(xi: &MPoint, zeta: &MPoint) -> Result<f64, GeometryError> {
    let a = xi.check_proper()?;
    let b = zeta.check_proper()?;
    let d = MPoint::new(std::array::from_fn(|i| xi.xi[i] / a - zeta.xi[i] / b));
    Ok(mprod(&d, &d))
}

/// `ξ∗ζ / (√(ξ∗ξ) √(ζ∗ζ))` for two circles.
pub fn normalized_product(xi: &MPoint, zeta: &MPoint) -> Result<f64, GeometryError> {
    let nx = xi.norm_sq();
    if nx <= 0.0 {
        return Err(GeometryError::NotCircle(nx));
    }
    let nz = zeta.norm_sq();
    if nz <= 0.0 {
        return Err(GeometryError::NotCircle(nz));
    }
    Ok(mprod(xi, zeta) / (nx.sqrt() * nz.sqrt()))
}

/// Angle `θ ∈ [0, π]` with `cos θ` the normalized product. Defined when the
/// normalized product lies in `[−1, 1]` (clamped within [`CLAMP_TOL`]).
pub fn intersection_angle(xi: &MPoint, zeta: &MPoint) -> Result<f64, GeometryError> {
    let c = normalized_product(xi, zeta)?;
    if c.abs() > 1.0 + CLAMP_TOL {
        return Err(GeometryError::DisjointCircles(c));
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Inversive distance `δ > 0` with `cosh δ = |normalized product|`, defined
/// when that magnitude exceeds 1. The sign separates the two configurations:
/// negative for disks lying outside each other, positive for nested disks.
pub fn inversive_distance(xi: &MPoint, zeta: &MPoint) -> Result<f64, GeometryError> {
    let c = normalized_product(xi, zeta)?;
    if c.abs() <= 1.0 + CLAMP_TOL {
        return Err(GeometryError::IntersectingCircles(c));
    }
    Ok(c.abs().acosh())
}

/// Power of the point `p(ξ)` (ξ null) with respect to the circle of `ζ`.
pub fn power_of_point(xi: &MPoint, zeta: &MPoint) -> Result<f64, GeometryError> {
    if !xi.is_null() {
        return Err(GeometryError::NotNull(xi.norm_sq()));
    }
    let nz = zeta.norm_sq();
    if nz <= 0.0 {
        return Err(GeometryError::NotCircle(nz));
    }
    let sep = point_separation_sq(xi, zeta)?;
    Ok(sep - project(zeta)?.w)
}

/// A linear map of ℝ⁴ preserving the Minkowski product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMap {
    m: Matrix4<f64>,
}

impl LorentzMap {
    /// Accepts `m` when `mᵀGm = G` to [`NULL_TOL`] relative to `max(1, |m|²)`.
    pub fn new(m: Matrix4<f64>) -> Result<Self, GeometryError> {
        let map = LorentzMap { m };
        let scale = m.amax().max(1.0);
        let defect = map.defect();
        if defect <= NULL_TOL * scale * scale {
            Ok(map)
        } else {
            Err(GeometryError::NotLorentz(defect))
        }
    }

    pub(crate) fn new_unchecked(m: Matrix4<f64>) -> Self {
        LorentzMap { m }
    }

    pub fn identity() -> Self {
        LorentzMap { m: Matrix4::identity() }
    }

    /// Rotation of the plane by `angle` about the origin.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut m = Matrix4::identity();
        m[(0, 0)] = c;
        m[(0, 1)] = -s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        LorentzMap { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// `max |mᵀGm − G|`.
    pub fn defect(&self) -> f64 {
        let g = metric();
        (self.m.transpose() * g * self.m - g).amax()
    }

    pub fn apply(&self, xi: &MPoint) -> MPoint {
        MPoint::from_vector(&(self.m * xi.to_vector()))
    }

    pub fn compose(&self, other: &LorentzMap) -> LorentzMap {
        LorentzMap { m: self.m * other.m }
    }
}

pub fn apply_lorentz(l: &LorentzMap, xi: &MPoint) -> MPoint {
    l.apply(xi)
}

/// Parameters of a first-order Möbius perturbation of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InfinitesimalMobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub t: f64,
    pub r: f64,
}

impl InfinitesimalMobius {
    /// The six unit generators in the order a, b, c, d, t, r.
    pub fn basis() -> [InfinitesimalMobius; 6] {
        let z = InfinitesimalMobius::default();
        [
            InfinitesimalMobius { a: 1.0, ..z },
            InfinitesimalMobius { b: 1.0, ..z },
            InfinitesimalMobius { c: 1.0, ..z },
            InfinitesimalMobius { d: 1.0, ..z },
            InfinitesimalMobius { t: 1.0, ..z },
            InfinitesimalMobius { r: 1.0, ..z },
        ]
    }

    /// The Lie-algebra element `M` with `I + εM` the first-order family.
    pub fn generator_matrix(&self) -> Matrix4<f64> {
        let &InfinitesimalMobius { a, b, c, d, t, r } = self;
        #[rustfmt::skip]
        let m = Matrix4::new(
            0.0,  r,   -b,  -a,
            -r,   0.0, -d,  -c,
            b,    d,   0.0,  t,
            -a,   -c,  t,   0.0,
        );
        m
    }

    /// `exp(εM)`, an exact Lorentz map.
    pub fn exp(&self, eps: f64) -> LorentzMap {
        LorentzMap::new_unchecked((self.generator_matrix() * eps).exp())
    }
}

/// `I + εM`. Its Lorentz defect is `O(ε²)`, so it is not validated.
pub fn infinitesimal_generator(g: &InfinitesimalMobius, eps: f64) -> LorentzMap {
    LorentzMap::new_unchecked(Matrix4::identity() + g.generator_matrix() * eps)
}

/// First-order change of the label at plane position `p`:
/// `δf = (a+b, c+d)·p + t`.
pub fn induced_label_variation(g: &InfinitesimalMobius, p: [f64; 2]) -> f64 {
    (g.a + g.b) * p[0] + (g.c + g.d) * p[1] + g.t
}
