mod common;

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pentagram::conics::{
    circumscribed_conic, conic_center, conic_through_points, inscribed_conic, is_concentric,
    kasner_i, r_operator, Center, Conic, PentagonConics, TOL_CONCENTRIC,
};
use pentagram::error::Error;
use pentagram::maps::pentagram_d;
use pentagram::polygon::random_convex_polygon;
use pentagram::{AffinePolygon, HomPoint, Polygon, ProjMap};

use common::non_affine_map;

fn on_circle(angles: [f64; 5], r: f64, cx: f64, cy: f64) -> [HomPoint; 5] {
    angles.map(|t| HomPoint::from_affine(cx + r * t.cos(), cy + r * t.sin()))
}

fn conic(m: Matrix3<f64>) -> Conic {
    Conic::new(m).unwrap()
}

fn regular() -> AffinePolygon {
    AffinePolygon::regular(5, Vector2::zeros(), 1.0, 0.0)
}

/// The circle `|x − c|² = r²` pushed forward by `x ↦ a x + b`, as a matrix.
fn image_of_circle(r: f64, a: &Matrix2<f64>, b: &Vector2<f64>) -> Matrix3<f64> {
    // pullback by the inverse map: y = a x + b  ⇔  x = a⁻¹ (y − b)
    let ai = a.try_inverse().unwrap();
    let t = ai * b;
    let inv = Matrix3::new(
        ai[(0, 0)],
        ai[(0, 1)],
        -t.x,
        ai[(1, 0)],
        ai[(1, 1)],
        -t.y,
        0.0,
        0.0,
        1.0,
    );
    let circle = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -r * r));
    inv.transpose() * circle * inv
}

#[test]
fn five_points_on_the_unit_circle() {
    let q = conic_through_points(&on_circle([0.1, 1.3, 2.0, 3.9, 5.2], 1.0, 0.0, 0.0)).unwrap();
    assert!(q.proj_equal(
        &conic(Matrix3::from_diagonal(&[1.0, 1.0, -1.0].into())),
        1e-12
    ));
}

#[test]
fn five_points_on_a_parabola() {
    let pts = [-2.0, -0.5, 0.3, 1.0, 2.5].map(|x: f64| HomPoint::from_affine(x, x * x));
    let q = conic_through_points(&pts).unwrap();
    let expected = conic(Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, -0.5, 0.0));
    assert!(q.proj_equal(&expected, 1e-12));
    for p in &pts {
        assert!(q.residual(p) <= 1e-12);
    }
}

#[test]
fn three_collinear_points_split_the_conic() {
    let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.3, 1.0), (1.5, 2.0)]
        .map(|(x, y)| HomPoint::from_affine(x, y));
    assert!(matches!(
        conic_through_points(&pts),
        Err(Error::DegenerateConic)
    ));
}

#[test]
fn four_collinear_points_do_not_determine_a_conic() {
    let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (1.5, 2.0)]
        .map(|(x, y)| HomPoint::from_affine(x, y));
    assert!(matches!(
        conic_through_points(&pts),
        Err(Error::DegenerateConfiguration(_))
    ));
}

#[test]
fn points_at_infinity_are_accepted() {
    // x² − y² = z² has its asymptotic directions (1, ±1, 0) at infinity
    let pts = [
        HomPoint::new(1.0, 1.0, 0.0),
        HomPoint::new(1.0, -1.0, 0.0),
        HomPoint::from_affine(1.0, 0.0),
        HomPoint::from_affine(-1.0, 0.0),
        HomPoint::from_affine(2.0, 3f64.sqrt()),
    ];
    let q = conic_through_points(&pts).unwrap();
    assert!(q.proj_equal(
        &conic(Matrix3::from_diagonal(&[1.0, -1.0, -1.0].into())),
        1e-12
    ));
}

#[test]
fn centers() {
    let unit = conic(Matrix3::from_diagonal(&[1.0, 1.0, -1.0].into()));
    assert!(matches!(conic_center(&unit), Center::Finite(_)));
    assert!(conic_center(&unit).finite().unwrap().norm() <= 1e-15);

    // (x − 1)² + y² = 1
    let shifted = conic(Matrix3::new(1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0));
    assert!((conic_center(&shifted).finite().unwrap() - Vector2::new(1.0, 0.0)).norm() <= 1e-15);

    let parabola = conic(Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, -0.5, 0.0));
    match conic_center(&parabola) {
        Center::AtInfinity(c) => assert!(c.proj_eq(&HomPoint::new(0.0, 1.0, 0.0), 1e-15)),
        other => panic!("expected a center at infinity, got {other:?}"),
    }
    assert!(matches!(
        conic_center(&parabola).finite(),
        Err(Error::CenterAtInfinity)
    ));
}

#[test]
fn regular_pentagon_conics_are_concentric_circles() {
    let p = regular().to_projective();
    let apothem = (PI / 5.0).cos();
    let qc = circumscribed_conic(&p).unwrap();
    let qi = inscribed_conic(&p).unwrap();
    assert!(qc.proj_equal(
        &conic(Matrix3::from_diagonal(&[1.0, 1.0, -1.0].into())),
        1e-12
    ));
    let circle = Matrix3::from_diagonal(&[1.0, 1.0, -apothem * apothem].into());
    assert!(qi.proj_equal(&conic(circle), 1e-12));
    assert!(is_concentric(&p, TOL_CONCENTRIC).unwrap());
}

#[test]
fn affine_image_of_the_regular_pentagon() {
    let a = Matrix2::new(2.0, 0.7, -0.3, 0.6);
    let b = Vector2::new(-1.5, 4.0);
    let p = regular().transformed(&a, &b).to_projective();
    let apothem = (PI / 5.0).cos();
    assert!(inscribed_conic(&p)
        .unwrap()
        .proj_equal(&conic(image_of_circle(apothem, &a, &b)), 1e-10));
    assert!(circumscribed_conic(&p)
        .unwrap()
        .proj_equal(&conic(image_of_circle(1.0, &a, &b)), 1e-10));
    assert!(is_concentric(&p, TOL_CONCENTRIC).unwrap());
}

#[test]
fn nearly_parallel_adjacent_sides() {
    for eps in [1e-3, 1e-5, 1e-7] {
        let p = AffinePolygon::from_xy(&[
            (-1.0, 0.0),
            (0.0, -eps),
            (1.0, 0.0),
            (0.6, 1.0),
            (-0.6, 1.0),
        ])
        .unwrap()
        .to_projective();
        let qi = inscribed_conic(&p).unwrap();
        for side in p.sides().unwrap() {
            assert!(qi.tangency_residual(&side) <= 1e-9, "eps {eps}");
        }
        for v in kasner_i(&p).unwrap().vertices() {
            assert!(qi.residual(v) <= 1e-10, "eps {eps}");
        }
    }
}

#[test]
fn fitted_conics_on_random_pentagons() {
    for seed in 0..500 {
        let p = random_convex_polygon(5, seed).to_projective();
        let qc = circumscribed_conic(&p).unwrap();
        for v in p.vertices() {
            assert!(qc.residual(v) <= 1e-10, "seed {seed}");
        }
        let qi = inscribed_conic(&p).unwrap();
        for side in p.sides().unwrap() {
            assert!(qi.tangency_residual(&side) <= 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn non_affine_images_of_the_regular_pentagon_are_not_concentric() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let g = non_affine_map(&mut rng);
        let p = regular().to_projective().map(&g).unwrap();
        assert!(!is_concentric(&p, TOL_CONCENTRIC).unwrap());
    }
}

#[test]
fn kasner_of_the_regular_pentagon() {
    let k = kasner_i(&regular().to_projective()).unwrap();
    let expected = AffinePolygon::regular(5, Vector2::zeros(), (PI / 5.0).cos(), PI / 5.0);
    let k = k.to_affine().unwrap();
    for (u, v) in k.points().iter().zip(expected.points()) {
        assert!((u - v).norm() <= 1e-12);
    }
}

#[test]
fn r_operator_of_the_regular_pentagon_is_a_central_scaling() {
    let r = r_operator(&regular().to_projective()).unwrap();
    let m = r.matrix() / r.matrix()[(2, 2)];
    let scale = m[(0, 0)];
    let expected = Matrix3::from_diagonal(&[scale, scale, 1.0].into());
    assert!((m - expected).norm() <= 1e-12);
    // Q_I⁻¹ Q_C for circles of radii cos(π/5) and 1
    assert!((scale - (PI / 5.0).cos().powi(2)).abs() <= 1e-12);
}

#[test]
fn r_operator_is_invariant_under_the_pentagram_map() {
    for seed in 0..50 {
        let p = random_convex_polygon(5, 100 + seed).to_projective();
        let r = r_operator(&p).unwrap();
        let rd = r_operator(&pentagram_d(&p).unwrap()).unwrap();
        assert!(rd.proj_equal(&r, 1e-8), "seed {seed}");
    }
}

#[test]
fn conic_data_matches_its_parts() {
    let p = random_convex_polygon(5, 21).to_projective();
    let data = PentagonConics::new(&p).unwrap();
    let qi = inscribed_conic(&p).unwrap();
    let qc = circumscribed_conic(&p).unwrap();
    assert!(data.inscribed.proj_equal(&qi, 1e-12));
    assert!(data.circumscribed.proj_equal(&qc, 1e-12));
    let expected = ProjMap::new(qi.matrix().try_inverse().unwrap() * qc.matrix());
    assert!(data.r_map.proj_equal(&expected, 1e-10));
    assert!(data.center_c.point().proj_eq(qc.center().point(), 1e-12));
}

#[test]
fn conics_need_a_pentagon() {
    let hexagon: Polygon = AffinePolygon::regular(6, Vector2::zeros(), 1.0, 0.0).to_projective();
    assert!(circumscribed_conic(&hexagon).is_err());
    assert!(inscribed_conic(&hexagon).is_err());
}
