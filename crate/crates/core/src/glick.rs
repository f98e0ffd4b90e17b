//! The `d_P` vector, Glick's operator `G_P` and its interior fixed point.
//!
//! For an affine polygon with vertices `v_i`, let `d_i = v_{i+1} − v_{i−1}` and
//! let `A_i` be the area of the triangle `(v_{i−1}, v_i, v_{i+1})`. Then
//! `d_P = Σ d_i / A_i`. Glick's operator acts on homogeneous vectors by
//!
//! ```text
//! G_P(v) = n v − Σ det[v_{i−1}, v, v_{i+1}] / det[v_{i−1}, v_i, v_{i+1}] · v_i
//! ```
//!
//! and is affine exactly when `d_P = 0`.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::linalg;
use crate::polygon::{centroid_inertia_normalize, cross, AffinePolygon, Polygon};
use crate::projective::{triple, HomLine, HomPoint, ProjMap, DEFAULT_TOL};

/// Default relative tolerance for `|d_P| = 0`, measured against `Σ |d_i| / A_i`.
pub const TOL_DP: f64 = 1e-9;

/// Relative eigenvalue gap below which the fixed point is found by iteration.
const EIGEN_GAP: f64 = 1e-7;

/// Everything computed from the vertex triples `(v_{i−1}, v_i, v_{i+1})`.
#[derive(Debug, Clone)]
pub struct GlickData {
    pub d_vectors: Vec<Vector2<f64>>,
    /// Triangle areas, positive for a convex polygon in either orientation.
    pub areas: Vec<f64>,
    pub d_p: Vector2<f64>,
    pub matrix: ProjMap,
    pub infinity_preimage: HomLine,
}

impl GlickData {
    pub fn new(p: &AffinePolygon) -> Result<Self> {
        let terms = Terms::checked(p)?;
        Ok(Self {
            d_p: terms.d_p(),
            infinity_preimage: terms.infinity_preimage(),
            matrix: glick_matrix(&p.to_projective())?,
            d_vectors: terms.d,
            areas: terms.areas,
        })
    }
}

/// Per-vertex `d_i` and oriented `A_i`.
struct Terms {
    d: Vec<Vector2<f64>>,
    areas: Vec<f64>,
    /// `det(v_{i−1}, v_{i+1})` as 2×2 determinant of the position vectors.
    dets: Vec<f64>,
}

impl Terms {
    /// Signed areas; only rejects (near-)collinear triples.
    fn raw(p: &AffinePolygon) -> Result<Self> {
        let n = p.len() as isize;
        let scale = p.diameter();
        let mut d = Vec::with_capacity(p.len());
        let mut areas = Vec::with_capacity(p.len());
        let mut dets = Vec::with_capacity(p.len());
        for i in 0..n {
            let (a, b, c) = (p.point(i - 1), p.point(i), p.point(i + 1));
            let area = 0.5 * cross(&(b - a), &(c - b));
            if area.abs() <= DEFAULT_TOL * scale * scale {
                return Err(Error::DegeneratePolygon(format!(
                    "triangle at vertex {i} has zero area"
                )));
            }
            d.push(c - a);
            areas.push(area);
            dets.push(cross(&a, &c));
        }
        Ok(Self { d, areas, dets })
    }

    /// Requires every triangle to turn the same way as the polygon. The areas
    /// are reported positive; `d_i / A_i` does not depend on the orientation.
    fn checked(p: &AffinePolygon) -> Result<Self> {
        let mut t = Self::raw(p)?;
        let sign = p.signed_area().signum();
        if let Some(i) = t.areas.iter().position(|a| a * sign <= 0.0) {
            return Err(Error::DegeneratePolygon(format!(
                "vertex {i} turns against the orientation"
            )));
        }
        if sign < 0.0 {
            // reversing the labeling negates every d_i, A_i and det term
            for ((d, a), det) in t.d.iter_mut().zip(&mut t.areas).zip(&mut t.dets) {
                *d = -*d;
                *a = -*a;
                *det = -*det;
            }
        }
        Ok(t)
    }

    fn d_p(&self) -> Vector2<f64> {
        self.d.iter().zip(&self.areas).map(|(d, a)| d / *a).sum()
    }

    fn scale(&self) -> f64 {
        self.d
            .iter()
            .zip(&self.areas)
            .map(|(d, a)| d.norm() / a.abs())
            .sum()
    }

    /// `(−d_Py, d_Px, 2n + Σ det(v_{i−1}, v_{i+1}) / A_i)`.
    ///
    /// The factor 2 comes from `det[v_{i−1}, v_i, v_{i+1}] = 2 A_i` for
    /// vertices with unit third coordinate.
    fn infinity_preimage(&self) -> HomLine {
        let d_p = self.d_p();
        let n = self.d.len() as f64;
        let z = 2.0 * n
            + self
                .dets
                .iter()
                .zip(&self.areas)
                .map(|(det, a)| det / a)
                .sum::<f64>();
        HomLine::new(-d_p.y, d_p.x, z)
    }
}

/// `d_P = Σ d_i / A_i` for a convex polygon.
pub fn d_vector(p: &AffinePolygon) -> Result<Vector2<f64>> {
    Ok(Terms::checked(p)?.d_p())
}

/// `Σ d_i / A_i` with signed areas, for polygons that may be non-convex.
pub fn d_vector_signed(p: &AffinePolygon) -> Result<Vector2<f64>> {
    Ok(Terms::raw(p)?.d_p())
}

/// The natural scale `Σ |d_i| / |A_i|` that `|d_P|` is compared against.
pub fn d_scale(p: &AffinePolygon) -> Result<f64> {
    Ok(Terms::raw(p)?.scale())
}

/// `|d_P| / Σ |d_i| / |A_i|`, a scale-free distance to the variety `d_P = 0`.
pub fn relative_d_norm(p: &AffinePolygon) -> Result<f64> {
    let t = Terms::raw(p)?;
    Ok(t.d_p().norm() / t.scale())
}

/// Jacobian of `d_P` with respect to the coordinates of vertex `j`.
pub fn d_vector_jacobian(p: &AffinePolygon, j: usize) -> Result<Matrix2<f64>> {
    let t = Terms::raw(p)?;
    let n = p.len();
    let j = j as isize;
    let idx = |k: isize| k.rem_euclid(n as isize) as usize;
    let v = |k: isize| p.point(k);
    // gradient of 2·A = cross(b − a, c − b) with respect to each corner
    let perp = |w: Vector2<f64>| Vector2::new(w.y, -w.x);
    let mut jac = Matrix2::zeros();
    // A_{j−1} = ½ cross(v_{j−1} − v_{j−2}, v_j − v_{j−1}); d_{j−1} = v_j − v_{j−2}
    {
        let k = idx(j - 1);
        let grad_a = 0.5 * perp(v(j - 2) - v(j - 1));
        let (d, a) = (t.d[k], t.areas[k]);
        jac += Matrix2::identity() / a - d * grad_a.transpose() / (a * a);
    }
    // A_j depends on v_j through cross(v_j − v_{j−1}, v_{j+1} − v_j); d_j is fixed
    {
        let k = idx(j);
        let grad_a = 0.5 * perp(v(j + 1) - v(j - 1));
        let (d, a) = (t.d[k], t.areas[k]);
        jac -= d * grad_a.transpose() / (a * a);
    }
    // A_{j+1} = ½ cross(v_{j+1} − v_j, v_{j+2} − v_{j+1}); d_{j+1} = v_{j+2} − v_j
    {
        let k = idx(j + 1);
        let grad_a = 0.5 * perp(v(j + 1) - v(j + 2));
        let (d, a) = (t.d[k], t.areas[k]);
        jac += -Matrix2::identity() / a - d * grad_a.transpose() / (a * a);
    }
    Ok(jac)
}

/// Matrix of Glick's operator. Invariant under rescaling of each vertex vector.
pub fn glick_matrix(p: &Polygon) -> Result<ProjMap> {
    let n = p.len() as isize;
    let mut m = Matrix3::identity() * n as f64;
    for i in 0..n {
        let (a, b, c) = (
            p.vertex(i - 1).coords(),
            p.vertex(i).coords(),
            p.vertex(i + 1).coords(),
        );
        let denom = triple(a, b, c);
        if denom.abs() <= DEFAULT_TOL * a.norm() * b.norm() * c.norm() {
            return Err(Error::DegeneratePolygon(format!(
                "vertices around {i} are collinear"
            )));
        }
        // det[a, v, c] = v · (c × a)
        let row: Vector3<f64> = c.cross(a);
        m -= b * row.transpose() / denom;
    }
    Ok(ProjMap::new(m))
}

/// Preimage of the line at infinity under `G_P`, computed from the affine
/// coordinates without forming the matrix.
pub fn infinity_preimage_line(p: &AffinePolygon) -> Result<HomLine> {
    Ok(Terms::checked(p)?.infinity_preimage())
}

/// Whether `G_P` fixes the line at infinity.
///
/// Polygons that lie in the standard chart are first normalized by an affine
/// map, which conjugates `G_P` by that map and leaves affinity unchanged but
/// makes `tol` independent of the polygon's size and position.
pub fn glick_is_affine(p: &Polygon, tol: f64) -> Result<bool> {
    let normalized = p
        .to_affine()
        .ok()
        .and_then(|a| centroid_inertia_normalize(&a).ok())
        .map(|(q, _)| q.to_projective());
    let g = glick_matrix(normalized.as_ref().unwrap_or(p))?;
    Ok(g.is_affine(tol))
}

/// The unique fixed point of `G_P` in the interior of a convex polygon.
pub fn glick_fixed_point(p: &Polygon) -> Result<HomPoint> {
    let hull = p.to_affine()?;
    if !hull.is_convex()? {
        return Err(Error::DegeneratePolygon("polygon is not convex".into()));
    }
    interior_fixed_point(&glick_matrix(p)?, &hull)
}

/// Fixed point of a projective map lying strictly inside the convex polygon
/// `hull`, for maps that contract the hull into its interior.
pub(crate) fn interior_fixed_point(map: &ProjMap, hull: &AffinePolygon) -> Result<HomPoint> {
    let m = map.matrix();
    let evs = linalg::real_eigenvalues(m);
    let spread = evs.iter().fold(0.0_f64, |s, l| s.max(l.abs()));
    let close = evs
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < EIGEN_GAP * spread);
    if close {
        return iterate_to_fixed_point(map, hull);
    }
    let mut inside = Vec::new();
    for &lambda in &evs {
        let Some(v) = linalg::eigenvector(m, lambda) else {
            continue;
        };
        let point = HomPoint::from_vector(v);
        if let Ok(q) = point.to_affine() {
            if hull.contains_strictly(&q, DEFAULT_TOL) {
                inside.push(point);
            }
        }
    }
    match inside.len() {
        0 => Err(Error::NoInteriorFixedPoint),
        1 => Ok(inside[0]),
        _ => Err(Error::AmbiguousFixedPoint),
    }
}

/// Iterate `map²` from the vertex centroid until the affine position settles.
fn iterate_to_fixed_point(map: &ProjMap, hull: &AffinePolygon) -> Result<HomPoint> {
    const CAP: usize = 10_000;
    let square = map.compose(map);
    let mut x = HomPoint::from_affine_vec(hull.centroid());
    let mut prev = hull.centroid();
    let step_tol = 1e-15 * hull.diameter().max(prev.norm());
    for _ in 0..CAP {
        x = square.apply(&x)?.normalized();
        let q = x.to_affine()?;
        if (q - prev).norm() <= step_tol {
            return Ok(x);
        }
        prev = q;
    }
    Err(Error::MaxIterationsExceeded(CAP))
}
