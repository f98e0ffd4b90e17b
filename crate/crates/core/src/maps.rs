//! The pentagram map `D`, its inverse `S`, orbits and convexity horizons.
//!
//! Labeling: vertex `i` of `D(P)` is the meet of the diagonals `(i−1, i+1)` and
//! `(i, i+2)`; vertex `i` of `S(P)` is the meet of sides `i−2` and `i`, where
//! side `j` joins vertices `j` and `j+1`. With this labeling both `D(S(P))` and
//! `S(D(P))` return `P` with identical indices, and `D(P*)` is the dual of
//! `S(P)` shifted by [`DUALITY_SHIFT`].

use std::fmt;

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::glick::d_vector_signed;
use crate::polygon::{centroid_inertia_normalize, AffinePolygon, Polygon};
use crate::projective::{join, meet, HomLine, HomPoint, ProjMap, DEFAULT_TOL};

/// `D(P*)[i] ≡ S(P)*[i + DUALITY_SHIFT]`.
pub const DUALITY_SHIFT: usize = 1;

/// Orbits are renormalized after this many raw steps regardless of the caller's
/// choice; unnormalized S-orbits grow geometrically.
pub const RAW_STEP_LIMIT: usize = 5;

/// Iteration cap for [`limit_point_by_shrinking`].
pub const SHRINK_CAP: usize = 10_000;

fn degenerate(e: Error) -> Error {
    match e {
        Error::CoincidentLines | Error::CoincidentPoints => {
            Error::DegeneratePolygon("coincident diagonals or sides".into())
        }
        other => other,
    }
}

/// The pentagram map: intersections of consecutive shortest diagonals.
pub fn pentagram_d(p: &Polygon) -> Result<Polygon> {
    let n = p.len() as isize;
    let vertices = (0..n)
        .map(|i| {
            let a = join(p.vertex(i - 1), p.vertex(i + 1))?;
            let b = join(p.vertex(i), p.vertex(i + 2))?;
            meet(&a, &b)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(degenerate)?;
    Polygon::new(vertices)
}

/// The inverse pentagram map: intersections of second-nearest sides.
pub fn inverse_s(p: &Polygon) -> Result<Polygon> {
    let sides = p.sides().map_err(degenerate)?;
    let n = sides.len();
    let vertices = (0..n)
        .map(|i| meet(&sides[(i + n - 2) % n], &sides[i]))
        .collect::<Result<Vec<_>>>()
        .map_err(degenerate)?;
    Polygon::new(vertices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PentagramMap {
    /// The inverse pentagram map.
    S,
    /// The pentagram map.
    D,
}

impl PentagramMap {
    pub fn apply(self, p: &Polygon) -> Result<Polygon> {
        match self {
            PentagramMap::S => inverse_s(p),
            PentagramMap::D => pentagram_d(p),
        }
    }
}

impl fmt::Display for PentagramMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PentagramMap::S => "S",
            PentagramMap::D => "D",
        })
    }
}

impl std::str::FromStr for PentagramMap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "S" | "s" => Ok(PentagramMap::S),
            "D" | "d" => Ok(PentagramMap::D),
            _ => Err(format!("unknown map {s:?}, expected S or D")),
        }
    }
}

/// Statistics of one orbit element, measured before renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStep {
    pub k: usize,
    pub convex: bool,
    /// `|d_P|`, NaN when it cannot be evaluated (vertex at infinity, collinear triple).
    pub d_norm: f64,
    /// `|d_P| / Σ |d_i| / |A_i|`, unchanged by scaling.
    pub d_rel: f64,
    /// Vertex diameter, infinite when a vertex is at infinity.
    pub diameter: f64,
    /// Vertex diameter of the un-normalized iterate, in the input's coordinates.
    pub orbit_diameter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedKmax,
    NonConvex,
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub steps: Vec<OrbitStep>,
    pub terminated: Termination,
    /// Composition of every renormalization applied. The last normalized iterate
    /// is `normalizer · map^k(P)`.
    pub normalizer: ProjMap,
    /// Every iterate as it was stored, i.e. after renormalization when it happened.
    pub frames: Vec<AffinePolygon>,
}

fn measure(k: usize, p: &Polygon) -> std::result::Result<OrbitStep, Error> {
    let convex = strictly_convex(p);
    let (d_norm, d_rel, diameter) = match p.to_affine() {
        Ok(a) => {
            let d = d_vector_signed(&a).map(|d| d.norm()).unwrap_or(f64::NAN);
            let rel = crate::glick::relative_d_norm(&a).unwrap_or(f64::NAN);
            (d, rel, a.diameter())
        }
        Err(_) => (f64::NAN, f64::NAN, f64::INFINITY),
    };
    Ok(OrbitStep {
        k,
        convex,
        d_norm,
        d_rel,
        diameter,
        orbit_diameter: diameter,
    })
}

/// Vertex diameter of `m · p`, infinite when a vertex lands at infinity. The
/// image is not rebuilt as a polygon: strongly flattened iterates can have
/// vertices closer than polygon validation accepts.
fn mapped_diameter(p: &Polygon, m: &ProjMap) -> f64 {
    let points: Option<Vec<Vector2<f64>>> = p
        .vertices()
        .iter()
        .map(|v| m.apply(v).and_then(|w| w.to_affine()).ok())
        .collect();
    let Some(points) = points else {
        return f64::INFINITY;
    };
    let mut diameter: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diameter = diameter.max((a - b).norm());
        }
    }
    diameter
}

/// Iterate `map` up to `k_max` times starting from a convex polygon.
///
/// Step 0 records the input. The orbit stops at the first non-convex or
/// degenerate iterate. With `renormalize`, each iterate is replaced by its
/// centroid/inertia normalization before the next step; without it, that
/// still happens once `k` exceeds [`RAW_STEP_LIMIT`].
pub fn orbit(p: &AffinePolygon, map: PentagramMap, k_max: usize, renormalize: bool) -> OrbitReport {
    orbit_with(p, map, k_max, renormalize, Ok)
}

/// [`orbit`] with a correction applied to every stored convex iterate after
/// renormalization (used for re-projection onto `d_P = 0`). A failing
/// correction ends the orbit as degenerate.
pub fn orbit_with<F>(
    p: &AffinePolygon,
    map: PentagramMap,
    k_max: usize,
    renormalize: bool,
    mut correct: F,
) -> OrbitReport
where
    F: FnMut(AffinePolygon) -> Result<AffinePolygon>,
{
    let mut steps = Vec::with_capacity(k_max + 1);
    let mut frames = vec![p.clone()];
    let mut normalizer = ProjMap::identity();
    // inverse of `normalizer`, accumulated step by step: inverting the product
    // directly fails once its scale has grown by many orders of magnitude
    let mut unnormalize = ProjMap::identity();
    let mut current = p.clone();

    match measure(0, &p.to_projective()) {
        Ok(s) => {
            let convex = s.convex;
            steps.push(s);
            if !convex {
                return OrbitReport {
                    steps,
                    terminated: Termination::NonConvex,
                    normalizer,
                    frames,
                };
            }
        }
        Err(_) => {
            return OrbitReport {
                steps,
                terminated: Termination::Degenerate,
                normalizer,
                frames,
            }
        }
    }

    let mut terminated = Termination::ReachedKmax;
    for k in 1..=k_max {
        let next = match map.apply(&current.to_projective()) {
            Ok(q) => q,
            Err(_) => {
                terminated = Termination::Degenerate;
                break;
            }
        };
        let step = match measure(k, &next) {
            Ok(mut s) => {
                s.orbit_diameter = mapped_diameter(&next, &unnormalize);
                s
            }
            Err(_) => {
                terminated = Termination::Degenerate;
                break;
            }
        };
        let convex = step.convex;
        steps.push(step);
        let affine = match next.to_affine() {
            Ok(a) => a,
            Err(_) => {
                terminated = Termination::NonConvex;
                break;
            }
        };
        if !convex {
            frames.push(affine);
            terminated = Termination::NonConvex;
            break;
        }
        current = if renormalize || k > RAW_STEP_LIMIT {
            match centroid_inertia_normalize(&affine) {
                Ok((q, m)) => match m.inverse() {
                    Ok(inv) => {
                        normalizer = m.compose(&normalizer);
                        unnormalize = unnormalize.compose(&inv);
                        q
                    }
                    Err(_) => {
                        terminated = Termination::Degenerate;
                        break;
                    }
                },
                Err(_) => {
                    terminated = Termination::Degenerate;
                    break;
                }
            }
        } else {
            affine
        };
        current = match correct(current) {
            Ok(q) => q,
            Err(_) => {
                terminated = Termination::Degenerate;
                break;
            }
        };
        frames.push(current.clone());
    }
    OrbitReport {
        steps,
        terminated,
        normalizer,
        frames,
    }
}

/// The limit point of the forward pentagram orbit of a convex polygon:
/// iterate `D` until the diameter drops below `diameter_tol`, then return the
/// vertex centroid.
///
/// The iterate is kept as `a · q + b` with `q` in centroid/inertia normal form
/// after every step. `D` commutes with affine maps, so this is the plain orbit;
/// it only avoids tiny or flattened polygons whose vertices are no longer
/// distinguishable in floating point.
pub fn limit_point_by_shrinking(p: &AffinePolygon, diameter_tol: f64) -> Result<Vector2<f64>> {
    assert!(diameter_tol > 0.0);
    let mut a = nalgebra::Matrix2::identity();
    let mut b = Vector2::zeros();
    let mut q = p.clone();
    for _ in 0..SHRINK_CAP {
        let original = q.transformed(&a, &b);
        if original.diameter() < diameter_tol {
            return Ok(original.centroid());
        }
        let (normalized, map) = centroid_inertia_normalize(&q)?;
        // normalized = m · q + t, so a · q + b = (a m⁻¹) · normalized + b − a m⁻¹ t
        let m = map.matrix().fixed_view::<2, 2>(0, 0).into_owned();
        let t = map.matrix().fixed_view::<2, 1>(0, 2).into_owned();
        let m_inv = m.try_inverse().ok_or(Error::SingularMap)?;
        b -= a * m_inv * t;
        a *= m_inv;
        q = pentagram_d(&normalized.to_projective())?.to_affine()?;
    }
    Err(Error::MaxIterationsExceeded(SHRINK_CAP))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// `S^k(P)` is the first non-convex iterate.
    At(usize),
    /// Every iterate up to `k_max` is convex.
    Survived,
}

impl Horizon {
    /// Horizon as a number, counting survival as `k_max + 1`.
    pub fn value(self, k_max: usize) -> usize {
        match self {
            Horizon::At(k) => k,
            Horizon::Survived => k_max + 1,
        }
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::At(k) => write!(f, "{k}"),
            Horizon::Survived => f.write_str("survived"),
        }
    }
}

/// How convexity of `S^k(P)` is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonMethod {
    /// Test `S^k(P)` directly.
    Direct,
    /// Test whether the line at infinity, as a point of the dual plane, lies
    /// inside `D^k(P*)` in the chart dual to an interior point of `P`.
    Dual,
}

/// Smallest `k ≤ k_max` with `S^k(P)` non-convex.
pub fn convexity_horizon(
    p: &AffinePolygon,
    k_max: usize,
    method: HorizonMethod,
) -> Result<Horizon> {
    match method {
        HorizonMethod::Direct => convexity_horizon_with(p, k_max, Ok),
        HorizonMethod::Dual => dual_horizon(p, k_max),
    }
}

/// Direct horizon with a correction applied to every normalized convex iterate
/// before the next step (used for re-projection onto `d_P = 0`).
pub fn convexity_horizon_with<F>(p: &AffinePolygon, k_max: usize, mut correct: F) -> Result<Horizon>
where
    F: FnMut(AffinePolygon) -> Result<AffinePolygon>,
{
    let orbit_err = |e: Error| Error::DegenerateOrbit(e.to_string());
    if !p.is_convex().map_err(orbit_err)? {
        return Err(Error::DegenerateOrbit(
            "initial polygon is not convex".into(),
        ));
    }
    let mut current = centroid_inertia_normalize(p).map_err(orbit_err)?.0;
    for k in 1..=k_max {
        let next = inverse_s(&current.to_projective()).map_err(orbit_err)?;
        if !strictly_convex(&next) {
            return Ok(Horizon::At(k));
        }
        let (normalized, _) = centroid_inertia_normalize(&next.to_affine()?).map_err(orbit_err)?;
        current = correct(normalized)?;
    }
    Ok(Horizon::Survived)
}

/// Convexity as used by orbits and horizons: nearly straight angles are
/// decided by the sign of the turn alone, an exactly straight one counts as
/// not convex.
pub fn strictly_convex(p: &Polygon) -> bool {
    match p.is_convex() {
        Ok(c) => c,
        Err(_) => p
            .to_affine()
            .and_then(|a| a.is_convex_within(0.0))
            .unwrap_or(false),
    }
}

/// Whether `S^k(P)` is convex, decided in the dual plane: the line at infinity,
/// viewed as a dual point, must lie inside `D^k(P*)`.
pub fn s_iterate_convex_via_dual(p: &AffinePolygon, k: usize) -> Result<bool> {
    let mut state = DualChart::new(p)?;
    for _ in 0..k {
        state.advance()?;
    }
    Ok(state.contains_infinity())
}

fn dual_horizon(p: &AffinePolygon, k_max: usize) -> Result<Horizon> {
    let orbit_err = |e: Error| Error::DegenerateOrbit(e.to_string());
    let mut state = DualChart::new(p).map_err(orbit_err)?;
    for k in 1..=k_max {
        state.advance().map_err(orbit_err)?;
        if !state.contains_infinity() {
            return Ok(Horizon::At(k));
        }
    }
    Ok(Horizon::Survived)
}

/// `D^k(P*)` and the dual point of the line at infinity, both in an affine
/// chart of the dual plane that omits the line dual to the centroid of `P`.
/// The pair is renormalized by a common affine map after every step.
struct DualChart {
    polygon: AffinePolygon,
    infinity: Vector2<f64>,
}

impl DualChart {
    fn new(p: &AffinePolygon) -> Result<Self> {
        if !p.is_convex()? {
            return Err(Error::DegeneratePolygon("polygon is not convex".into()));
        }
        let o = p.centroid();
        let chart_line = HomLine::new(o.x, o.y, 1.0);
        let chart = ProjMap::sending_to_infinity(&chart_line);
        let dual = p.to_projective().dual()?;
        if dual
            .vertices()
            .iter()
            .any(|v| chart_line.contains(v, DEFAULT_TOL))
        {
            return Err(Error::VertexOnChartLine);
        }
        let polygon = dual.map(&chart)?.to_affine()?;
        let infinity = chart.apply(&HomPoint::new(0.0, 0.0, 1.0))?.to_affine()?;
        Ok(Self { polygon, infinity })
    }

    fn advance(&mut self) -> Result<()> {
        let next = pentagram_d(&self.polygon.to_projective())?.to_affine()?;
        let (normalized, m) = centroid_inertia_normalize(&next)?;
        self.infinity = m
            .apply(&HomPoint::from_affine_vec(self.infinity))?
            .to_affine()?;
        self.polygon = normalized;
        Ok(())
    }

    fn contains_infinity(&self) -> bool {
        self.polygon.contains_strictly(&self.infinity, DEFAULT_TOL)
    }
}
