//! Inscribed and circumscribed conics of pentagons, the Kasner map `I` and the
//! operator `R_P = Q_I⁻¹ Q_C`.
//!
//! A conic is a symmetric 3×3 matrix `q` modulo scale; `p` lies on it when
//! `pᵀ q p = 0`. The polar of a point `p` is the line `q p` and the pole of a
//! line `l` is the point `q⁻¹ l`. The dual conic, made of the tangent lines, is
//! `q⁻¹`.

use nalgebra::{Matrix3, Matrix6, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::polygon::{centroid_inertia_normalize, Polygon};
use crate::projective::triple;
use crate::projective::{canonical_scale, HomLine, HomPoint, ProjMap, DEFAULT_TOL};

/// Required ratio `σ₅ / σ₁` of the 5×6 incidence system.
pub const RANK_TOL: f64 = 1e-10;

/// Threshold on `|det q|` of the normalized fit below which a conic splits
/// into lines.
pub const DEGENERATE_DET: f64 = 1e-9;

/// Default tolerance for concentricity, relative to the circumscribed scale.
pub const TOL_CONCENTRIC: f64 = 1e-7;

/// `D(I(P))[i] ≡ I(D(P))[i + KASNER_SHIFT]`.
pub const KASNER_SHIFT: usize = 0;

/// `I(I(P))[i] ≡ R_P(P)[i + R_SQUARE_SHIFT]`.
pub const R_SQUARE_SHIFT: usize = 1;

/// `D(P)[i] ≡ (G_P − 3·Id)(P)[i + CLEBSCH_SHIFT]`.
pub const CLEBSCH_SHIFT: usize = 3;

/// A nondegenerate conic, stored with its largest-magnitude entry equal to `+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    q: Matrix3<f64>,
}

impl Conic {
    /// Symmetrizes and normalizes `q`; fails if the conic is degenerate.
    pub fn new(q: Matrix3<f64>) -> Result<Self> {
        let q = canonical_scale(&(0.5 * (q + q.transpose())));
        if q.determinant().abs() <= DEGENERATE_DET {
            return Err(Error::DegenerateConic);
        }
        Ok(Self { q })
    }

    /// `mᵀ q m` for invertible `m`. Congruence preserves nondegeneracy, so
    /// the determinant is not re-checked in the new, possibly badly scaled, frame.
    fn congruent(q: &Matrix3<f64>, m: &Matrix3<f64>) -> Self {
        let q = m.transpose() * q * m;
        Self {
            q: canonical_scale(&(0.5 * (q + q.transpose()))),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.q
    }

    /// `|pᵀ q p| / |p|²`.
    pub fn residual(&self, p: &HomPoint) -> f64 {
        let v = p.coords();
        (v.transpose() * self.q * v)[0].abs() / v.norm_squared()
    }

    /// The conic of tangent lines, in the dual plane.
    pub fn dual(&self) -> Conic {
        Conic {
            q: canonical_scale(&self.inverse()),
        }
    }

    /// Tangency residual of a line: `|lᵀ q⁻¹ l| / |l|²` with `q⁻¹` normalized.
    pub fn tangency_residual(&self, l: &HomLine) -> f64 {
        let inv = canonical_scale(&self.inverse());
        let v = l.coords();
        (v.transpose() * inv * v)[0].abs() / v.norm_squared()
    }

    pub fn polar(&self, p: &HomPoint) -> HomLine {
        HomLine::from_vector(self.q * p.coords())
    }

    pub fn pole(&self, l: &HomLine) -> HomPoint {
        HomPoint::from_vector(self.inverse() * l.coords())
    }

    /// Pole of the line at infinity.
    pub fn center(&self) -> Center {
        let c = self.pole(&HomLine::infinity());
        if c.is_at_infinity(DEFAULT_TOL) {
            Center::AtInfinity(c)
        } else {
            Center::Finite(c)
        }
    }

    /// `q⁻¹` via the adjugate, which exists for every nondegenerate conic.
    fn inverse(&self) -> Matrix3<f64> {
        let q = &self.q;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            q[(r0, c0)] * q[(r1, c1)] - q[(r0, c1)] * q[(r1, c0)]
        };
        let adj = Matrix3::new(
            cof(1, 2, 1, 2),
            -cof(0, 2, 1, 2),
            cof(0, 1, 1, 2),
            -cof(1, 2, 0, 2),
            cof(0, 2, 0, 2),
            -cof(0, 1, 0, 2),
            cof(1, 2, 0, 1),
            -cof(0, 2, 0, 1),
            cof(0, 1, 0, 1),
        );
        adj / q.determinant()
    }

    pub fn proj_equal(&self, other: &Conic, tol: f64) -> bool {
        ProjMap::new(self.q).proj_equal(&ProjMap::new(other.q), tol)
    }
}

/// Center of a conic: the pole of the line at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Center {
    Finite(HomPoint),
    /// Parabolas have their center on the line at infinity.
    AtInfinity(HomPoint),
}

impl Center {
    pub fn point(&self) -> &HomPoint {
        match self {
            Center::Finite(p) | Center::AtInfinity(p) => p,
        }
    }

    pub fn finite(&self) -> Result<Vector2<f64>> {
        match self {
            Center::Finite(p) => p.to_affine(),
            Center::AtInfinity(_) => Err(Error::CenterAtInfinity),
        }
    }
}

pub fn conic_center(c: &Conic) -> Center {
    c.center()
}

/// The unique conic through five points.
///
/// The six coefficients span the null space of the 5×6 incidence matrix with
/// rows `(x², xy, y², xz, yz, z²)`. The points are first moved by a projective
/// map sending four of them to four vertices of a regular pentagon, so the
/// system stays well scaled even when some points are near infinity.
pub fn conic_through_points(pts: &[HomPoint; 5]) -> Result<Conic> {
    let precondition = frame_normalizer(pts).unwrap_or_else(|| similarity_normalizer(pts));
    let mapped: Vec<Vector3<f64>> = pts
        .iter()
        .map(|p| {
            let v = precondition * p.coords();
            v / v.norm()
        })
        .collect();

    let mut a = Matrix6::zeros();
    for (row, v) in mapped.iter().enumerate() {
        let (x, y, z) = (v.x, v.y, v.z);
        let entries = [x * x, x * y, y * y, x * z, y * z, z * z];
        for (col, e) in entries.iter().enumerate() {
            a[(row, col)] = *e;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = |k: usize| svd.singular_values[order[k]];
    if !(sigma(4) > RANK_TOL * sigma(0)) {
        return Err(Error::DegenerateConfiguration(
            "five points do not determine a unique conic".into(),
        ));
    }
    let c = v_t.row(order[5]);
    let local = Matrix3::new(
        c[0],
        c[1] / 2.0,
        c[3] / 2.0,
        c[1] / 2.0,
        c[2],
        c[4] / 2.0,
        c[3] / 2.0,
        c[4] / 2.0,
        c[5],
    );
    // degeneracy is judged in the well-scaled frame
    if canonical_scale(&local).determinant().abs() <= DEGENERATE_DET {
        return Err(Error::DegenerateConic);
    }
    Ok(Conic::congruent(&local, &precondition))
}

/// Projective map sending the four best-spread points to four vertices of a
/// regular pentagon; `None` when every choice has three nearly collinear points.
fn frame_normalizer(pts: &[HomPoint; 5]) -> Option<Matrix3<f64>> {
    let unit: Vec<Vector3<f64>> = pts.iter().map(|p| p.coords() / p.norm()).collect();
    let spread = |skip: usize| {
        let four: Vec<usize> = (0..5).filter(|&i| i != skip).collect();
        let mut worst = f64::INFINITY;
        for a in 0..4 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    worst = worst.min(triple(&unit[four[a]], &unit[four[b]], &unit[four[c]]).abs());
                }
            }
        }
        (four, worst)
    };
    let (four, worst) = (0..5)
        .map(spread)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("five choices");
    if !(worst > 1e-6) {
        return None;
    }
    let source = basis_map(&four.iter().map(|&i| unit[i]).collect::<Vec<_>>())?;
    let target: Vec<Vector3<f64>> = (0..4)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 5.0;
            Vector3::new(t.cos(), t.sin(), 1.0)
        })
        .collect();
    Some(basis_map(&target)? * source.try_inverse()?)
}

/// The map sending `e1, e2, e3, (1,1,1)` to the four given points.
fn basis_map(four: &[Vector3<f64>]) -> Option<Matrix3<f64>> {
    let m = Matrix3::from_columns(&[four[0], four[1], four[2]]);
    let w = m.try_inverse()? * four[3];
    Some(m * Matrix3::from_diagonal(&w))
}

/// Similarity moving finite points to zero centroid and mean distance `√2`;
/// identity when some point is at infinity.
fn similarity_normalizer(pts: &[HomPoint]) -> Matrix3<f64> {
    let affine: Option<Vec<Vector2<f64>>> = pts.iter().map(|p| p.to_affine().ok()).collect();
    let Some(affine) = affine else {
        return Matrix3::identity();
    };
    let c = affine.iter().sum::<Vector2<f64>>() / affine.len() as f64;
    let mean = affine.iter().map(|p| (p - c).norm()).sum::<f64>() / affine.len() as f64;
    if !(mean > 0.0) {
        return Matrix3::identity();
    }
    let s = std::f64::consts::SQRT_2 / mean;
    Matrix3::new(s, 0.0, -s * c.x, 0.0, s, -s * c.y, 0.0, 0.0, 1.0)
}

fn pentagon_vertices(p: &Polygon) -> Result<[HomPoint; 5]> {
    p.vertices().try_into().map_err(|_| {
        Error::DegenerateConfiguration(format!("expected a pentagon, got {} vertices", p.len()))
    })
}

/// Conic through the five vertices of a pentagon (`Q_C`).
pub fn circumscribed_conic(p: &Polygon) -> Result<Conic> {
    conic_through_points(&pentagon_vertices(p)?)
}

/// Conic tangent to the five sides of a pentagon (`Q_I`): the conic through the
/// sides viewed as dual points, dualized back.
pub fn inscribed_conic(p: &Polygon) -> Result<Conic> {
    pentagon_vertices(p)?;
    let sides: Vec<HomPoint> = p.sides()?.iter().map(HomLine::to_dual).collect();
    let sides: [HomPoint; 5] = sides.try_into().expect("five sides");
    Ok(conic_through_points(&sides)?.dual())
}

/// `R_P = Q_I⁻¹ Q_C`: sends `A` to the point whose polar with respect to the
/// inscribed conic equals the polar of `A` with respect to the circumscribed one.
pub fn r_operator(p: &Polygon) -> Result<ProjMap> {
    let qc = circumscribed_conic(p)?;
    let qi = inscribed_conic(p)?;
    Ok(r_from_conics(&qi, &qc))
}

fn r_from_conics(qi: &Conic, qc: &Conic) -> ProjMap {
    ProjMap::new(canonical_scale(&(qi.inverse() * qc.q)))
}

/// The fixed point of `R_P` inside a convex pentagon.
pub fn r_fixed_point(p: &Polygon) -> Result<HomPoint> {
    let hull = p.to_affine()?;
    if !hull.is_convex()? {
        return Err(Error::DegeneratePolygon("polygon is not convex".into()));
    }
    crate::glick::interior_fixed_point(&r_operator(p)?, &hull)
}

/// The Kasner map: vertex `i` is the point where side `i` touches the
/// inscribed conic.
pub fn kasner_i(p: &Polygon) -> Result<Polygon> {
    let qi = inscribed_conic(p)?;
    let vertices = p.sides()?.iter().map(|l| qi.pole(l).normalized()).collect();
    Polygon::new(vertices)
}

/// Both conics of a pentagon together with `R_P` and the two centers.
#[derive(Debug, Clone)]
pub struct PentagonConics {
    pub circumscribed: Conic,
    pub inscribed: Conic,
    pub r_map: ProjMap,
    pub center_c: Center,
    pub center_i: Center,
}

impl PentagonConics {
    pub fn new(p: &Polygon) -> Result<Self> {
        let circumscribed = circumscribed_conic(p)?;
        let inscribed = inscribed_conic(p)?;
        Ok(Self {
            r_map: r_from_conics(&inscribed, &circumscribed),
            center_c: circumscribed.center(),
            center_i: inscribed.center(),
            circumscribed,
            inscribed,
        })
    }

    /// Distance between the two centers relative to the root mean squared
    /// distance from the vertices to the circumscribed center.
    pub fn relative_center_distance(&self, p: &Polygon) -> Result<f64> {
        let cc = self.center_c.finite()?;
        let ci = self.center_i.finite()?;
        let pts = p.to_affine()?;
        let scale = (pts
            .points()
            .iter()
            .map(|v| (v - cc).norm_squared())
            .sum::<f64>()
            / pts.len() as f64)
            .sqrt();
        Ok((cc - ci).norm() / scale)
    }

    /// How far `R_P` is from fixing the line at infinity: the `(x, y)` part of
    /// its third row relative to the `z` entry.
    pub fn r_affinity_defect(&self) -> f64 {
        let m = self.r_map.canonical();
        m[(2, 0)].hypot(m[(2, 1)]) / m[(2, 2)].abs()
    }
}

/// Whether the inscribed and circumscribed conics share their center.
///
/// The test runs on the centroid/inertia normalization of the pentagon, which
/// is affine and so preserves both centers and affinity of `R_P`. The center
/// distance and the affinity of `R_P` are both evaluated; they must agree.
pub fn is_concentric(p: &Polygon, tol_c: f64) -> Result<bool> {
    let frame = match p.to_affine() {
        Ok(a) => centroid_inertia_normalize(&a)?.0.to_projective(),
        Err(_) => p.clone(),
    };
    let conics = PentagonConics::new(&frame)?;
    let by_centers = conics.relative_center_distance(&frame)? <= tol_c;
    let by_affinity = conics.r_affinity_defect() <= tol_c;
    if by_centers != by_affinity {
        return Err(Error::InternalInconsistency(format!(
            "center distance {:e} and R_P affinity defect {:e} disagree at tolerance {tol_c:e}",
            conics.relative_center_distance(&frame)?,
            conics.r_affinity_defect()
        )));
    }
    Ok(by_centers)
}
