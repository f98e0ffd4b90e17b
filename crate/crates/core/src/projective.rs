//! Homogeneous coordinates on the real projective plane and its dual.
//!
//! Points and lines are both triples modulo nonzero scale. A point `p` lies on
//! a line `l` when `l · p = 0`. Joins and meets are cross products, renormalized
//! to unit Euclidean length so that long orbits neither overflow nor underflow.

use std::fmt;

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};

/// Relative tolerance used for every projective comparison unless overridden.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point of the projective plane in homogeneous coordinates `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint(Vector3<f64>);

/// A line `{ax + by + cz = 0}` of the projective plane, stored as `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomLine(Vector3<f64>);

macro_rules! homogeneous_common {
    ($ty:ident) => {
        impl $ty {
            /// Panics if all three coordinates are zero.
            pub fn new(a: f64, b: f64, c: f64) -> Self {
                Self::from_vector(Vector3::new(a, b, c))
            }

            pub fn from_vector(v: Vector3<f64>) -> Self {
                assert!(
                    v.iter().any(|c| *c != 0.0) && v.iter().all(|c| c.is_finite()),
                    concat!(
                        stringify!($ty),
                        " needs finite, not all zero coordinates: {:?}"
                    ),
                    v
                );
                Self(v)
            }

            pub fn coords(&self) -> &Vector3<f64> {
                &self.0
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }

            /// The same element rescaled to unit Euclidean norm.
            pub fn normalized(&self) -> Self {
                Self(self.0 / self.0.norm())
            }

            /// Projective equality: `|a × b| ≤ tol · |a| · |b|`.
            pub fn proj_eq(&self, other: &Self, tol: f64) -> bool {
                self.proj_distance(other) <= tol
            }

            /// Sine of the angle between the two representatives, a scale-free
            /// distance on the projective plane.
            pub fn proj_distance(&self, other: &Self) -> f64 {
                self.0.cross(&other.0).norm() / (self.0.norm() * other.0.norm())
            }

            /// Reinterpret the coordinates in the dual plane.
            pub fn to_dual(&self) -> <Self as Dual>::Other {
                <Self as Dual>::Other::from_vector(self.0)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({}, {}, {})", self.0.x, self.0.y, self.0.z)
            }
        }
    };
}

/// Points and lines are exchanged by projective duality.
pub trait Dual {
    type Other;
}

impl Dual for HomPoint {
    type Other = HomLine;
}

impl Dual for HomLine {
    type Other = HomPoint;
}

homogeneous_common!(HomPoint);
homogeneous_common!(HomLine);

impl HomPoint {
    /// Embed the affine point `(x, y)` as `(x, y, 1)`.
    pub fn from_affine(x: f64, y: f64) -> Self {
        Self::new(x, y, 1.0)
    }

    pub fn from_affine_vec(p: Vector2<f64>) -> Self {
        Self::new(p.x, p.y, 1.0)
    }

    pub fn is_at_infinity(&self, tol: f64) -> bool {
        self.0.z.abs() <= tol * self.0.norm()
    }

    /// Coordinates in the standard chart `P² \ {z = 0}`.
    pub fn to_affine(&self) -> Result<Vector2<f64>> {
        if self.is_at_infinity(DEFAULT_TOL) {
            return Err(Error::PointAtInfinity);
        }
        Ok(Vector2::new(self.0.x / self.0.z, self.0.y / self.0.z))
    }
}

impl HomLine {
    /// The line at infinity `z = 0`.
    pub fn infinity() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    /// Scale-free incidence residual `|l · p| / (|l| |p|)`.
    pub fn incidence(&self, p: &HomPoint) -> f64 {
        self.0.dot(&p.0).abs() / (self.0.norm() * p.0.norm())
    }

    pub fn contains(&self, p: &HomPoint, tol: f64) -> bool {
        self.incidence(p) <= tol
    }
}

/// Line through two distinct points.
pub fn join(p: &HomPoint, q: &HomPoint) -> Result<HomLine> {
    let c = p.0.cross(&q.0);
    let n = c.norm();
    if n <= DEFAULT_TOL * p.0.norm() * q.0.norm() {
        return Err(Error::CoincidentPoints);
    }
    Ok(HomLine(c / n))
}

/// Intersection point of two distinct lines.
pub fn meet(l1: &HomLine, l2: &HomLine) -> Result<HomPoint> {
    let c = l1.0.cross(&l2.0);
    let n = c.norm();
    if n <= DEFAULT_TOL * l1.0.norm() * l2.0.norm() {
        return Err(Error::CoincidentLines);
    }
    Ok(HomPoint(c / n))
}

/// `det[a, b, c]` of three homogeneous vectors.
pub fn triple(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    a.dot(&b.cross(c))
}

/// A 3×3 matrix modulo nonzero scale, acting on points by `p ↦ m p`.
///
/// Lines are pushed forward by the inverse transpose, so incidence is preserved.
/// Rank-deficient matrices are allowed; they fail only where the kernel or the
/// inverse is actually needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjMap(Matrix3<f64>);

impl ProjMap {
    pub fn new(m: Matrix3<f64>) -> Self {
        assert!(
            m.iter().any(|c| *c != 0.0),
            "ProjMap needs a nonzero matrix"
        );
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Affine map `x ↦ a x + b`.
    pub fn affine(a: nalgebra::Matrix2<f64>, b: Vector2<f64>) -> Self {
        Self(Matrix3::new(
            a[(0, 0)],
            a[(0, 1)],
            b.x,
            a[(1, 0)],
            a[(1, 1)],
            b.y,
            0.0,
            0.0,
            1.0,
        ))
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self::affine(nalgebra::Matrix2::identity(), Vector2::new(dx, dy))
    }

    /// Some projective transformation taking `line` to the line at infinity.
    ///
    /// The third row is `line`; the first two rows complete it to an orthogonal frame.
    pub fn sending_to_infinity(line: &HomLine) -> Self {
        let l = line.0.normalize();
        // Any vector not parallel to l seeds the Gram-Schmidt step.
        let seed = if l.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let a = (seed - l * l.dot(&seed)).normalize();
        let b = l.cross(&a);
        Self(Matrix3::from_rows(&[
            a.transpose(),
            b.transpose(),
            l.transpose(),
        ]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, p: &HomPoint) -> Result<HomPoint> {
        let v = self.0 * p.0;
        if v.norm() <= DEFAULT_TOL * self.0.norm() * p.0.norm() {
            return Err(Error::KernelHit);
        }
        Ok(HomPoint(v))
    }

    pub fn apply_to_line(&self, l: &HomLine) -> Result<HomLine> {
        let inv = self.inverse()?;
        Ok(HomLine(inv.0.transpose() * l.0))
    }

    /// Pull a line back along the map: the covector `mᵀ l`.
    pub fn pullback_line(&self, l: &HomLine) -> Result<HomLine> {
        let v = self.0.transpose() * l.0;
        if v.norm() <= DEFAULT_TOL * self.0.norm() * l.0.norm() {
            return Err(Error::KernelHit);
        }
        Ok(HomLine(v))
    }

    pub fn is_invertible(&self) -> bool {
        let scale = self.0.abs().max();
        self.0.determinant().abs() > DEFAULT_TOL * scale * scale * scale
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::SingularMap);
        }
        self.0.try_inverse().map(Self).ok_or(Error::SingularMap)
    }

    /// The dual map, acting on the dual plane.
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> Self {
        Self(self.0 * other.0)
    }

    /// Representative scaled so that the largest-magnitude entry equals `+1`.
    pub fn canonical(&self) -> Matrix3<f64> {
        canonical_scale(&self.0)
    }

    /// Max entrywise difference of the canonical representatives.
    ///
    /// Both matrices are divided by their entry at the same pivot position, so
    /// near-ties in the largest entry cannot pick different representatives.
    /// The pivot of each argument is tried and the larger distance is kept.
    pub fn proj_distance(&self, other: &ProjMap) -> f64 {
        let at_pivot = |k: usize| {
            let (a, b) = (self.0[k], other.0[k]);
            if a == 0.0 || b == 0.0 {
                return f64::INFINITY;
            }
            (self.0 / a - other.0 / b).abs().max()
        };
        at_pivot(argmax_abs(&self.0)).max(at_pivot(argmax_abs(&other.0)))
    }

    pub fn proj_equal(&self, other: &ProjMap, tol: f64) -> bool {
        self.proj_distance(other) <= tol
    }

    /// Whether the third row is proportional to `(0, 0, 1)`, i.e. the map fixes
    /// the line at infinity.
    pub fn is_affine(&self, tol: f64) -> bool {
        let m = self.canonical();
        m[(2, 0)].abs() <= tol && m[(2, 1)].abs() <= tol && m[(2, 2)].abs() > tol
    }
}

/// Column-major index of the first entry of maximal magnitude.
fn argmax_abs(m: &Matrix3<f64>) -> usize {
    let mut best = 0;
    for (k, v) in m.iter().enumerate() {
        if v.abs() > m[best].abs() {
            best = k;
        }
    }
    best
}

/// Scale `m` so that its largest-magnitude entry is `+1`.
///
/// Ties between entries of equal magnitude and opposite sign are broken by the
/// first such entry in column-major order.
pub(crate) fn canonical_scale(m: &Matrix3<f64>) -> Matrix3<f64> {
    let mut pivot = 0.0_f64;
    for v in m.iter() {
        // Strict comparison keeps the first entry of maximal magnitude.
        if v.abs() > pivot.abs() * (1.0 + 1e-12) {
            pivot = *v;
        }
    }
    m / pivot
}

impl std::ops::Mul for ProjMap {
    type Output = ProjMap;

    fn mul(self, rhs: ProjMap) -> ProjMap {
        self.compose(&rhs)
    }
}
