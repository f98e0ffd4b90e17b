//! Polygons in the projective plane and in the standard affine chart.
//!
//! Vertices are indexed cyclically modulo `n`. Side `i` joins vertices `i` and
//! `i + 1`. The dual polygon has side `i` as its vertex `i`, which makes
//! `dual(dual(P))[i] = P[i + 1]`.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::projective::{join, HomLine, HomPoint, ProjMap, DEFAULT_TOL};

/// Smallest vertex count accepted by every polygon type.
pub const MIN_VERTICES: usize = 5;

/// Index shift of the double dual: `dual(dual(P))[i] ≡ P[i + DUAL_ROUNDTRIP_SHIFT]`.
pub const DUAL_ROUNDTRIP_SHIFT: usize = 1;

/// A closed polygon with at least five vertices in the projective plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<HomPoint>,
}

impl Polygon {
    /// Rejects fewer than five vertices and consecutive coincident vertices.
    /// Collinear triples are reported by the operations that cannot handle them.
    pub fn new(vertices: Vec<HomPoint>) -> Result<Self> {
        if vertices.len() < MIN_VERTICES {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].proj_eq(&vertices[(i + 1) % n], DEFAULT_TOL) {
                return Err(Error::DegeneratePolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[HomPoint] {
        &self.vertices
    }

    /// Vertex with cyclic index.
    pub fn vertex(&self, i: isize) -> &HomPoint {
        let n = self.vertices.len() as isize;
        &self.vertices[i.rem_euclid(n) as usize]
    }

    /// Side `i` is the line through vertices `i` and `i + 1`.
    pub fn side(&self, i: isize) -> Result<HomLine> {
        join(self.vertex(i), self.vertex(i + 1))
    }

    pub fn sides(&self) -> Result<Vec<HomLine>> {
        (0..self.len() as isize).map(|i| self.side(i)).collect()
    }

    pub fn map(&self, m: &ProjMap) -> Result<Polygon> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| m.apply(v))
            .collect::<Result<Vec<_>>>()?;
        Polygon::new(vertices)
    }

    /// Polygon in the dual plane whose vertex `i` is side `i` of `self`.
    pub fn dual(&self) -> Result<Polygon> {
        let vertices = self.sides()?.into_iter().map(|l| l.to_dual()).collect();
        Polygon::new(vertices)
    }

    /// Vertex `i` of the result is vertex `i + shift` of `self`.
    pub fn rotated(&self, shift: usize) -> Polygon {
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(shift % self.len());
        Polygon { vertices }
    }

    /// Largest projective distance between `self[i]` and `other[i + shift]`.
    pub fn vertex_distance(&self, other: &Polygon, shift: usize) -> f64 {
        assert_eq!(self.len(), other.len());
        let n = self.len();
        (0..n)
            .map(|i| self.vertices[i].proj_distance(&other.vertices[(i + shift) % n]))
            .fold(0.0, f64::max)
    }

    /// Smallest cyclic shift `s` with `self[i] ≡ other[i + s]` for every `i`.
    pub fn matching_shift(&self, other: &Polygon, tol: f64) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        (0..self.len()).find(|&s| self.vertex_distance(other, s) <= tol)
    }

    /// Every vertex finite in the standard chart.
    pub fn to_affine(&self) -> Result<AffinePolygon> {
        let points = self
            .vertices
            .iter()
            .map(HomPoint::to_affine)
            .collect::<Result<Vec<_>>>()?;
        AffinePolygon::new(points)
    }

    /// Whether the polygon is strictly convex in the standard chart.
    ///
    /// A vertex at infinity makes the polygon non-convex in that chart.
    pub fn is_convex(&self) -> Result<bool> {
        if self.vertices.iter().any(|v| v.is_at_infinity(DEFAULT_TOL)) {
            return Ok(false);
        }
        self.to_affine()?.is_convex()
    }
}

impl From<&AffinePolygon> for Polygon {
    fn from(p: &AffinePolygon) -> Self {
        Polygon {
            vertices: p
                .points
                .iter()
                .map(|q| HomPoint::from_affine_vec(*q))
                .collect(),
        }
    }
}

/// Convexity of `p` in the affine chart `P² \ chart_line`.
pub fn convexity_in_chart(p: &Polygon, chart_line: &HomLine) -> Result<bool> {
    convexity_in_chart_via(p, chart_line, &ProjMap::sending_to_infinity(chart_line))
}

/// As [`convexity_in_chart`], using a caller-chosen map that sends `chart_line`
/// to the line at infinity.
pub fn convexity_in_chart_via(p: &Polygon, chart_line: &HomLine, chart: &ProjMap) -> Result<bool> {
    if p.vertices()
        .iter()
        .any(|v| chart_line.contains(v, DEFAULT_TOL))
    {
        return Err(Error::VertexOnChartLine);
    }
    debug_assert!(chart
        .apply_to_line(chart_line)
        .map(|l| l.proj_eq(&HomLine::infinity(), 1e-8))
        .unwrap_or(false));
    p.map(chart)?.is_convex()
}

/// Whether `point` lies strictly inside `p`, both viewed in the chart
/// `P² \ chart_line`.
pub fn contains_in_chart(p: &Polygon, chart_line: &HomLine, point: &HomPoint) -> Result<bool> {
    if p.vertices()
        .iter()
        .any(|v| chart_line.contains(v, DEFAULT_TOL))
    {
        return Err(Error::VertexOnChartLine);
    }
    if chart_line.contains(point, DEFAULT_TOL) {
        return Ok(false);
    }
    let chart = ProjMap::sending_to_infinity(chart_line);
    let poly = p.map(&chart)?.to_affine()?;
    let q = chart.apply(point)?.to_affine()?;
    Ok(poly.contains_strictly(&q, DEFAULT_TOL))
}

/// A polygon of finite points `(x, y)` in the standard chart.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePolygon {
    points: Vec<Vector2<f64>>,
}

impl AffinePolygon {
    pub fn new(points: Vec<Vector2<f64>>) -> Result<Self> {
        if points.len() < MIN_VERTICES {
            return Err(Error::TooFewVertices(points.len()));
        }
        if let Some(bad) = points
            .iter()
            .find(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::DegeneratePolygon(format!(
                "non-finite vertex {bad:?}"
            )));
        }
        Ok(Self { points })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        Self::new(xy.iter().map(|&(x, y)| Vector2::new(x, y)).collect())
    }

    /// Regular `n`-gon with vertex `k` at angle `phase + 2πk/n`, counter-clockwise.
    pub fn regular(n: usize, center: Vector2<f64>, radius: f64, phase: f64) -> Self {
        assert!(n >= MIN_VERTICES);
        let points = (0..n)
            .map(|k| {
                let t = phase + TAU * k as f64 / n as f64;
                center + radius * Vector2::new(t.cos(), t.sin())
            })
            .collect();
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector2<f64>] {
        &self.points
    }

    pub fn point(&self, i: isize) -> Vector2<f64> {
        let n = self.points.len() as isize;
        self.points[i.rem_euclid(n) as usize]
    }

    pub fn to_projective(&self) -> Polygon {
        Polygon::from(self)
    }

    pub fn centroid(&self) -> Vector2<f64> {
        self.points.iter().sum::<Vector2<f64>>() / self.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    /// Shoelace area, positive for counter-clockwise order.
    pub fn signed_area(&self) -> f64 {
        let n = self.len() as isize;
        0.5 * (0..n)
            .map(|i| cross(&self.point(i), &self.point(i + 1)))
            .sum::<f64>()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// Same vertex cycle traversed in the opposite direction, keeping vertex 0.
    pub fn reversed(&self) -> AffinePolygon {
        let n = self.len();
        let points = (0..n).map(|i| self.points[(n - i) % n]).collect();
        AffinePolygon { points }
    }

    /// `cross(v_i − v_{i−1}, v_{i+1} − v_i)` for every vertex.
    pub fn turn_crosses(&self) -> Vec<f64> {
        let n = self.len() as isize;
        (0..n)
            .map(|i| {
                let (a, b, c) = (self.point(i - 1), self.point(i), self.point(i + 1));
                cross(&(b - a), &(c - b))
            })
            .collect()
    }

    /// Strict convexity: every turn has the same sign and the turns sum to one
    /// full revolution, which rules out star polygons.
    pub fn is_convex(&self) -> Result<bool> {
        self.is_convex_within(DEFAULT_TOL)
    }

    /// [`is_convex`](Self::is_convex) with turns of magnitude at most
    /// `tol · diameter²` reported as degenerate.
    pub fn is_convex_within(&self, tol: f64) -> Result<bool> {
        let scale = self.diameter();
        let crosses = self.turn_crosses();
        if let Some(i) = crosses.iter().position(|c| c.abs() <= tol * scale * scale) {
            return Err(Error::DegeneratePolygon(format!(
                "vertices {}, {i}, {} are collinear",
                (i + self.len() - 1) % self.len(),
                (i + 1) % self.len()
            )));
        }
        let positive = crosses[0] > 0.0;
        if crosses.iter().any(|c| (*c > 0.0) != positive) {
            return Ok(false);
        }
        let n = self.len() as isize;
        let turning: f64 = (0..n)
            .map(|i| {
                let (a, b, c) = (self.point(i - 1), self.point(i), self.point(i + 1));
                let (u, v) = (b - a, c - b);
                cross(&u, &v).atan2(u.dot(&v))
            })
            .sum();
        Ok((turning.abs() - TAU).abs() < 0.5)
    }

    /// Winding-number test with a strict margin of `tol · diameter` to the boundary.
    pub fn contains_strictly(&self, q: &Vector2<f64>, tol: f64) -> bool {
        let n = self.len() as isize;
        let margin = tol * self.diameter();
        let mut winding = 0i32;
        for i in 0..n {
            let (a, b) = (self.point(i), self.point(i + 1));
            if segment_distance(q, &a, &b) <= margin {
                return false;
            }
            let side = cross(&(b - a), &(q - a));
            if a.y <= q.y {
                if b.y > q.y && side > 0.0 {
                    winding += 1;
                }
            } else if b.y <= q.y && side < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Image under an affine map `x ↦ a x + b`.
    pub fn transformed(&self, a: &Matrix2<f64>, b: &Vector2<f64>) -> AffinePolygon {
        AffinePolygon {
            points: self.points.iter().map(|p| a * p + b).collect(),
        }
    }

    /// Image under a projective map; fails if a vertex leaves the chart.
    pub fn map(&self, m: &ProjMap) -> Result<AffinePolygon> {
        self.to_projective().map(m)?.to_affine()
    }
}

/// Affinely normalize `p`: vertex centroid at the origin, vertex second-moment
/// matrix equal to the identity, vertex 0 on the positive x-axis.
///
/// Returns the normalized polygon and the affine map that produced it.
pub fn centroid_inertia_normalize(p: &AffinePolygon) -> Result<(AffinePolygon, ProjMap)> {
    let c = p.centroid();
    let n = p.len() as f64;
    let moment = p
        .points()
        .iter()
        .map(|v| (v - c) * (v - c).transpose())
        .sum::<Matrix2<f64>>()
        / n;
    let eig = SymmetricEigen::new(moment);
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(lo > DEFAULT_TOL * hi) {
        return Err(Error::DegeneratePolygon(
            "vertex second moment is rank deficient".into(),
        ));
    }
    let inv_sqrt = Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let whiten = eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let q0 = whiten * (p.points()[0] - c);
    let (s, co) = (-q0.y.atan2(q0.x)).sin_cos();
    let rotation = Matrix2::new(co, -s, s, co);
    let a = rotation * whiten;
    let b = -(a * c);
    Ok((p.transformed(&a, &b), ProjMap::affine(a, b)))
}

/// Random strictly convex counter-clockwise `n`-gon, deterministic in `seed`.
pub fn random_convex_polygon(n: usize, seed: u64) -> AffinePolygon {
    random_convex_polygon_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Vertices at sorted uniform angles with cyclic gaps of at least `0.1 / n`,
/// radii uniform in `[0.5, 1]`; draws are rejected until the polygon is
/// strictly convex.
pub fn random_convex_polygon_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AffinePolygon {
    assert!(n >= MIN_VERTICES, "n must be at least {MIN_VERTICES}");
    let min_gap = 0.1 / n as f64;
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let wrap = angles[0] + TAU - angles[n - 1];
        if wrap < min_gap || angles.windows(2).any(|w| w[1] - w[0] < min_gap) {
            continue;
        }
        let points = angles
            .iter()
            .map(|t| rng.gen_range(0.5..=1.0) * Vector2::new(t.cos(), t.sin()))
            .collect();
        let poly = AffinePolygon { points };
        if let Ok(true) = poly.is_convex() {
            return poly;
        }
    }
}

pub(crate) fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn segment_distance(q: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let t = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (q - (a + t * ab)).norm()
}
