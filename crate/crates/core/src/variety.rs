//! Newton projection of convex polygons onto the variety `d_P = 0`.
//!
//! One vertex moves while the others stay put, so `d_P` becomes a map from
//! the plane to the plane and an ordinary 2×2 Newton iteration applies. The
//! Jacobian is taken by central differences, independently of the analytic
//! derivative in [`crate::glick`].

use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::glick::{d_scale, d_vector_signed};
use crate::maps::{convexity_horizon_with, Horizon};
use crate::polygon::{random_convex_polygon_with, AffinePolygon};

pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// Smallest damping factor tried before giving up on a step: `2⁻²⁰`.
pub const MIN_DAMPING: f64 = 1.0 / (1u32 << 20) as f64;

/// Central-difference step relative to the polygon diameter.
pub const FD_STEP: f64 = 1e-6;

/// Shortest edge, relative to the diameter, that [`project_any_vertex`] accepts.
pub const MIN_EDGE_FRACTION: f64 = 1e-3;

/// Relative residual that re-projection inside orbits aims for.
pub const REPROJECT_TOL: f64 = 1e-12;

/// Outcome of a successful projection.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub result: AffinePolygon,
    pub iterations: usize,
    /// `|d_P| / Σ |d_i| / A_i` of the result.
    pub final_residual: f64,
    pub moved_vertex: usize,
    /// Distance the moved vertex travelled.
    pub displacement: f64,
}

fn with_vertex(p: &AffinePolygon, j: usize, q: Vector2<f64>) -> AffinePolygon {
    let mut pts = p.points().to_vec();
    pts[j] = q;
    AffinePolygon::new(pts).expect("same vertex count")
}

fn residual(p: &AffinePolygon) -> Result<(Vector2<f64>, f64)> {
    let d = d_vector_signed(p)?;
    Ok((d, d.norm() / d_scale(p)?))
}

/// Central-difference Jacobian of `d_P` in the coordinates of vertex `j`.
pub fn fd_jacobian(p: &AffinePolygon, j: usize, h: f64) -> Result<Matrix2<f64>> {
    let v = p.points()[j];
    let mut jac = Matrix2::zeros();
    for axis in 0..2 {
        let mut e = Vector2::zeros();
        e[axis] = h;
        let plus = d_vector_signed(&with_vertex(p, j, v + e))?;
        let minus = d_vector_signed(&with_vertex(p, j, v - e))?;
        jac.set_column(axis, &((plus - minus) / (2.0 * h)));
    }
    Ok(jac)
}

fn smallest_singular_value(m: &Matrix2<f64>) -> f64 {
    m.singular_values().min()
}

/// Vertices ordered from best to worst conditioned local chart, by the smallest
/// singular value of the central-difference Jacobian.
pub fn vertex_preference(p: &AffinePolygon) -> Result<Vec<usize>> {
    let h = FD_STEP * p.diameter();
    let mut scored = (0..p.len())
        .map(|j| Ok((j, smallest_singular_value(&fd_jacobian(p, j, h)?))))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored.into_iter().map(|(j, _)| j).collect())
}

/// Moves one vertex of a strictly convex polygon until `|d_P|` relative to its
/// natural scale is at most `tol`, keeping the polygon strictly convex.
///
/// With `vertex_index = None` the best-conditioned vertex is moved.
pub fn project_to_variety(
    p: &AffinePolygon,
    vertex_index: Option<usize>,
    tol: f64,
) -> Result<SolveReport> {
    assert!(tol > 0.0, "tolerance must be positive");
    if !p.is_convex()? {
        return Err(Error::DegeneratePolygon("polygon is not convex".into()));
    }
    let j = match vertex_index {
        Some(j) if j < p.len() => j,
        Some(j) => {
            return Err(Error::DegenerateConfiguration(format!(
                "vertex index {j} out of range for {} vertices",
                p.len()
            )))
        }
        None => vertex_preference(p)?[0],
    };
    let start = p.points()[j];
    let h = FD_STEP * p.diameter();
    let mut current = p.clone();
    let (mut d, mut res) = residual(&current)?;

    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        if res <= tol {
            return Ok(SolveReport {
                displacement: (current.points()[j] - start).norm(),
                result: current,
                iterations: iteration,
                final_residual: res,
                moved_vertex: j,
            });
        }
        if iteration == MAX_NEWTON_ITERATIONS {
            break;
        }
        let jac = fd_jacobian(&current, j, h)?;
        let step = jac.lu().solve(&(-d)).ok_or_else(|| {
            Error::DegenerateConfiguration(format!("singular Jacobian at vertex {j}"))
        })?;
        let v = current.points()[j];
        let mut lambda = 1.0;
        let mut saw_convex = false;
        let mut accepted = None;
        while lambda >= MIN_DAMPING {
            let trial = with_vertex(&current, j, v + lambda * step);
            if matches!(trial.is_convex(), Ok(true)) {
                saw_convex = true;
                if let Ok((td, tr)) = residual(&trial) {
                    if tr < res {
                        accepted = Some((trial, td, tr));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, td, tr)) => {
                current = trial;
                d = td;
                res = tr;
            }
            None if !saw_convex => return Err(Error::ConvexityLost),
            None => break,
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual: res,
    })
}

/// Whether every edge is at least [`MIN_EDGE_FRACTION`] of the diameter.
pub fn is_well_shaped(p: &AffinePolygon) -> bool {
    let diam = p.diameter();
    (0..p.len() as isize).all(|i| (p.point(i + 1) - p.point(i)).norm() >= MIN_EDGE_FRACTION * diam)
}

/// Projects with the best vertex, then the others in order of conditioning.
///
/// Results where the moved vertex has nearly collapsed onto a neighbour are
/// on the variety but useless for iteration, so they count as failures.
pub fn project_any_vertex(p: &AffinePolygon, tol: f64) -> Result<SolveReport> {
    let mut last = Error::ConvexityLost;
    for j in vertex_preference(p)? {
        match project_to_variety(p, Some(j), tol) {
            Ok(r) if is_well_shaped(&r.result) => return Ok(r),
            Ok(r) => {
                last = Error::DegeneratePolygon(format!(
                    "moving vertex {} collapses an edge",
                    r.moved_vertex
                ))
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `count` random strictly convex `n`-gons on the variety.
///
/// Item `i` draws from a generator seeded with `seed + i`, resampling until a
/// projection succeeds. At most `10 · count` resamples are allowed in total.
pub fn sample_variety(n: usize, count: usize, seed: u64, tol: f64) -> Result<Vec<AffinePolygon>> {
    if n < crate::polygon::MIN_VERTICES {
        return Err(Error::TooFewVertices(n));
    }
    let budget = 10 * count;
    let mut resamples = 0;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        loop {
            let p = random_convex_polygon_with(n, &mut rng);
            if let Ok(r) = project_any_vertex(&p, tol) {
                out.push(r.result);
                break;
            }
            resamples += 1;
            if resamples > budget {
                return Err(Error::ExhaustedAttempts(budget));
            }
        }
    }
    Ok(out)
}

/// Pulls a polygon that has drifted slightly off the variety back onto it.
pub fn reproject(p: AffinePolygon) -> Result<AffinePolygon> {
    Ok(project_any_vertex(&p, REPROJECT_TOL)?.result)
}

/// Re-projection is on by default for horizons beyond ten steps.
pub fn reproject_by_default(k_max: usize) -> bool {
    k_max > 10
}

/// Convexity horizon under `S` with every iterate re-projected onto `d_P = 0`.
pub fn horizon_reprojected(p: &AffinePolygon, k_max: usize) -> Result<Horizon> {
    convexity_horizon_with(p, k_max, reproject)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glick::{d_vector_jacobian, relative_d_norm};
    use crate::polygon::random_convex_polygon;

    #[test]
    fn regular_pentagon_is_already_there() {
        let p = AffinePolygon::regular(5, Vector2::zeros(), 1.0, 0.3);
        for j in 0..5 {
            let r = project_to_variety(&p, Some(j), 1e-12).unwrap();
            assert!(r.iterations <= 1);
            assert!(r.final_residual <= 1e-12);
            assert!(r.displacement < 1e-12);
        }
    }

    #[test]
    fn random_pentagon_converges() {
        let p = random_convex_polygon(5, 3);
        let r = project_to_variety(&p, Some(0), 1e-12).unwrap();
        assert!(r.final_residual <= 1e-12);
        assert!(r.result.is_convex().unwrap());
        assert!(relative_d_norm(&r.result).unwrap() <= 1e-12);
        for k in 1..5 {
            assert_eq!(r.result.points()[k], p.points()[k]);
        }
    }

    #[test]
    fn flat_pentagon_is_rejected() {
        let p =
            AffinePolygon::from_xy(&[(0., 0.), (1., 0.), (2., 1e-13), (2., 1.), (0., 1.)]).unwrap();
        let err = project_to_variety(&p, None, 1e-12).unwrap_err();
        assert!(
            matches!(err, Error::DegeneratePolygon(_) | Error::ConvexityLost),
            "{err:?}"
        );
    }

    #[test]
    fn fd_matches_analytic_jacobian() {
        for seed in 0..20 {
            let p = random_convex_polygon(6, seed);
            for j in 0..6 {
                let fd = fd_jacobian(&p, j, FD_STEP * p.diameter()).unwrap();
                let an = d_vector_jacobian(&p, j).unwrap();
                assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0));
            }
        }
    }

    #[test]
    fn sampler_meets_postconditions() {
        let ps = sample_variety(5, 10, 1, 1e-12).unwrap();
        assert_eq!(ps.len(), 10);
        for p in &ps {
            assert!(relative_d_norm(p).unwrap() <= 1e-12);
            assert!(p.is_convex().unwrap());
        }
        let again = sample_variety(5, 10, 1, 1e-12).unwrap();
        assert_eq!(ps, again);
    }
}
